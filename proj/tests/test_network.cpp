// Network model: JSON parsing, serialization, layout accessors, validation.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "cpnet/network.hpp"
#include "helpers.hpp"

using cpnet::NetworkSpec;
using cpnet::parse_network;
using cpnet::serialize_network;
using cpnet::validate_network;

TEST_CASE("parse a single-node network") {
    NetworkSpec net = parse_network(
        R"({"name":"one","nodes":[{"id":"A","states":["t","f"],"cpt":[0.3,0.7]}]})");
    REQUIRE(net.name == "one");
    REQUIRE(net.nodes.size() == 1);
    REQUIRE(net.nodes[0].id == "A");
    REQUIRE(net.nodes[0].states == std::vector<std::string>{"t", "f"});
    REQUIRE(net.nodes[0].parents.empty());
    REQUIRE(net.nodes[0].cpt == std::vector<double>{0.3, 0.7});
}

TEST_CASE("parse the two-node chain") {
    NetworkSpec net = test_helpers::chain2();
    REQUIRE(net.nodes.size() == 2);
    REQUIRE(net.node_index("A") == 0);
    REQUIRE(net.node_index("B") == 1);
    REQUIRE(net.node_index("Z") == -1);
    REQUIRE(net.nodes[1].parents == std::vector<std::string>{"A"});
    REQUIRE(net.nodes[1].cpt == std::vector<double>{0.9, 0.1, 0.2, 0.8});
    REQUIRE(net.state_count(0) == 2);
    REQUIRE(net.state_index(0, "f") == 1);
    REQUIRE(net.state_index(0, "x") == -1);
    REQUIRE(net.family_scope(1) == std::vector<int>{0, 1});
    REQUIRE(net.children_of(0) == std::vector<int>{1});
    REQUIRE(net.children_of(1).empty());
}

TEST_CASE("cpt_table lays a family out as (parents, node)") {
    NetworkSpec net = test_helpers::chain2();
    cpnet::BeliefTable t = net.cpt_table(1);
    REQUIRE(t.scope() == std::vector<int>{0, 1});
    REQUIRE(t.shape() == std::vector<std::int64_t>{2, 2});
    REQUIRE(t.at(0) == 0.9);
    REQUIRE(t.at(1) == 0.1);
    REQUIRE(t.at(2) == 0.2);
    REQUIRE(t.at(3) == 0.8);
}

TEST_CASE("parse errors carry a reason") {
    REQUIRE_THROWS_AS(parse_network("{"), cpnet::ParseError);
    REQUIRE_THROWS_AS(parse_network("[]"), cpnet::ParseError);
    REQUIRE_THROWS_AS(parse_network(R"({"nodes":[{"id":7,"states":["t","f"],"cpt":[1,0]}]})"),
                      cpnet::ParseError);
    REQUIRE_THROWS_AS(
        parse_network(R"({"nodes":[{"id":"A","states":["t","f"],"cpt":[1,0]},)"
                      R"({"id":"A","states":["t","f"],"cpt":[1,0]}]})"),
        cpnet::ParseError);
    REQUIRE_THROWS_AS(
        parse_network(
            R"({"nodes":[{"id":"A","states":["t","f"],"parents":["Z"],"cpt":[1,0,1,0]}]})"),
        cpnet::ParseError);
    REQUIRE_THROWS_AS(
        parse_network(
            R"({"nodes":[{"id":"A","states":["t","f"],"parents":["A"],"cpt":[1,0,1,0]}]})"),
        cpnet::ParseError);
    REQUIRE_THROWS_AS(parse_network(R"({"nodes":[{"id":"A","states":["t","f"]}]})"),
                      cpnet::ParseError);

    try {
        parse_network("{\"name\": nope}");
        FAIL("expected a parse error");
    } catch (const cpnet::ParseError& e) {
        REQUIRE(e.byte_pos() > 0);
        REQUIRE(std::string(e.what()).find("network") != std::string::npos);
    }
}

TEST_CASE("forward parent references are allowed") {
    NetworkSpec net = parse_network(
        R"({"nodes":[{"id":"B","states":["t","f"],"parents":["A"],"cpt":[0.9,0.1,0.2,0.8]},)"
        R"({"id":"A","states":["t","f"],"cpt":[0.3,0.7]}]})");
    REQUIRE(validate_network(net).valid());
    REQUIRE(net.family_scope(0) == std::vector<int>{1, 0});
}

TEST_CASE("validate accepts the chain and counts parameters") {
    auto rep = validate_network(test_helpers::chain2());
    REQUIRE(rep.valid());
    REQUIRE(rep.parameter_count == 6);
    REQUIRE(rep.zero_count == 0);
}

TEST_CASE("validate counts stored zeros") {
    NetworkSpec net = parse_network(
        R"({"nodes":[{"id":"A","states":["t","f"],"cpt":[1.0,0.0]}]})");
    auto rep = validate_network(net);
    REQUIRE(rep.valid());
    REQUIRE(rep.parameter_count == 2);
    REQUIRE(rep.zero_count == 1);
}

TEST_CASE("validate flags bad row sums with the row index") {
    NetworkSpec net = test_helpers::chain2();
    net.nodes[1].cpt = {0.9, 0.2, 0.2, 0.8}; // first parent configuration sums to 1.1
    auto rep = validate_network(net);
    REQUIRE(rep.violations.size() == 1);
    REQUIRE(rep.violations[0].kind == "row-sum");
    REQUIRE(rep.violations[0].node == "B");
    REQUIRE(rep.violations[0].index == 0);
}

TEST_CASE("validate flags out-of-range entries") {
    NetworkSpec net = test_helpers::chain2();
    net.nodes[0].cpt = {-0.5, 1.5};
    auto rep = validate_network(net);
    bool saw_range = false;
    for (const auto& v : rep.violations) saw_range |= (v.kind == "entry-range");
    REQUIRE(saw_range);
}

TEST_CASE("validate flags wrong cpt length") {
    NetworkSpec net = test_helpers::chain2();
    net.nodes[1].cpt = {0.9, 0.1};
    auto rep = validate_network(net);
    REQUIRE(rep.violations.size() == 1);
    REQUIRE(rep.violations[0].kind == "cpt-length");
}

TEST_CASE("validate flags degenerate state sets") {
    NetworkSpec one;
    one.nodes.push_back({"A", {"only"}, {}, {1.0}});
    REQUIRE_FALSE(validate_network(one).valid());

    NetworkSpec dup;
    dup.nodes.push_back({"A", {"t", "t"}, {}, {0.5, 0.5}});
    auto rep = validate_network(dup);
    REQUIRE_FALSE(rep.valid());
    REQUIRE(rep.violations[0].kind == "states");
}

TEST_CASE("validate detects directed cycles") {
    NetworkSpec net;
    net.nodes.push_back({"A", {"t", "f"}, {"B"}, {0.9, 0.1, 0.2, 0.8}});
    net.nodes.push_back({"B", {"t", "f"}, {"A"}, {0.9, 0.1, 0.2, 0.8}});
    auto rep = validate_network(net);
    bool saw_cycle = false;
    for (const auto& v : rep.violations)
        if (v.kind == "cycle") {
            saw_cycle = true;
            REQUIRE(v.message.find("->") != std::string::npos);
        }
    REQUIRE(saw_cycle);
}

TEST_CASE("serialization round-trips byte for byte") {
    NetworkSpec net = test_helpers::chain3();
    std::string first = serialize_network(net);
    NetworkSpec back = parse_network(first);
    REQUIRE(serialize_network(back) == first);
    REQUIRE(back.nodes.size() == net.nodes.size());
    REQUIRE(back.nodes[2].cpt == net.nodes[2].cpt);
    REQUIRE(first.back() == '\n');
}

TEST_CASE("serialization preserves tiny and denormal-free values") {
    NetworkSpec net;
    net.nodes.push_back({"A", {"t", "f"}, {}, {1.0 - 1e-17, 1e-17}});
    NetworkSpec back = parse_network(serialize_network(net));
    REQUIRE(back.nodes[0].cpt[0] == net.nodes[0].cpt[0]);
    REQUIRE(back.nodes[0].cpt[1] == net.nodes[0].cpt[1]);
}
