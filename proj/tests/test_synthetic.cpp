// Seeded network generator: determinism, structural guarantees, calibration.

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "cpnet/compiler.hpp"
#include "cpnet/engine.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/network.hpp"
#include "cpnet/serialize.hpp"
#include "cpnet/synthetic.hpp"

#include "helpers.hpp"

using cpnet::SyntheticConfig;
using cpnet::generate_synthetic;

TEST_CASE("same seed reproduces the network byte for byte") {
    SyntheticConfig cfg;
    cfg.nodes = 12;
    cfg.alpha = 0.7;
    cfg.zero_fraction = 0.3;
    cfg.seed = 42;

    const std::string a = cpnet::serialize_network(generate_synthetic(cfg));
    const std::string b = cpnet::serialize_network(generate_synthetic(cfg));
    REQUIRE(a == b);

    cfg.seed = 43;
    const std::string c = cpnet::serialize_network(generate_synthetic(cfg));
    REQUIRE(a != c);
}

TEST_CASE("generated networks validate cleanly across configurations") {
    for (int nodes : {1, 2, 7, 30}) {
        for (double zf : {0.0, 0.4}) {
            SyntheticConfig cfg;
            cfg.nodes = nodes;
            cfg.min_states = 2;
            cfg.max_states = 5;
            cfg.alpha = 0.3;
            cfg.zero_fraction = zf;
            cfg.seed = 9000 + nodes;
            cpnet::NetworkSpec net = generate_synthetic(cfg);
            cpnet::ValidationReport rep = cpnet::validate_network(net);
            INFO("nodes=" << nodes << " zf=" << zf);
            CAPTURE(rep.violations.size());
            REQUIRE(rep.valid());
        }
    }
}

TEST_CASE("naming and structure follow the documented scheme") {
    SyntheticConfig cfg;
    cfg.nodes = 10;
    cfg.seed = 5;
    cpnet::NetworkSpec net = generate_synthetic(cfg);

    REQUIRE(net.name == "synthetic-10n-5");
    REQUIRE(net.nodes.size() == 10);
    for (int i = 0; i < 10; ++i) {
        const cpnet::NodeSpec& node = net.nodes[static_cast<std::size_t>(i)];
        REQUIRE(node.id == "n" + std::to_string(i));
        REQUIRE(node.states.size() >= 2);
        REQUIRE(node.states.size() <= 4);
        for (std::size_t s = 0; s < node.states.size(); ++s)
            REQUIRE(node.states[s] == "s" + std::to_string(s));
        // parents point strictly backwards, so the graph is acyclic by construction
        REQUIRE(node.parents.size() <= 3);
        int prev = -1;
        for (const std::string& pid : node.parents) {
            int p = std::stoi(pid.substr(1));
            REQUIRE(p < i);
            REQUIRE(p > prev); // sorted ascending, no duplicates
            prev = p;
        }
    }
}

TEST_CASE("generated networks compile and propagate to unit mass") {
    SyntheticConfig cfg;
    cfg.nodes = 9;
    cfg.zero_fraction = 0.25;
    cfg.seed = 314;
    cpnet::JunctionTree jt =
        cpnet::compile_network(generate_synthetic(cfg), cpnet::Heuristic::min_size);
    cpnet::CaseResult r = cpnet::run_case(jt, {});
    REQUIRE(test_helpers::near(r.detail.mu, 1.0, 1e-9));
}

TEST_CASE("zero fraction calibrates the share of vanishing parameters") {
    SyntheticConfig cfg;
    cfg.nodes = 57;
    cfg.min_states = 3;
    cfg.max_states = 4;
    cfg.zero_fraction = 0.67;
    cfg.seed = 2024;
    cpnet::NetworkSpec net = generate_synthetic(cfg);
    cpnet::ValidationReport rep = cpnet::validate_network(net);
    REQUIRE(rep.valid());
    REQUIRE(rep.parameter_count > 500); // enough rows for the average to settle
    double frac = static_cast<double>(rep.zero_count) /
                  static_cast<double>(rep.parameter_count);
    REQUIRE(test_helpers::near(frac, 0.67, 0.05));

    SyntheticConfig dense_cfg = cfg;
    dense_cfg.zero_fraction = 0.0;
    cpnet::ValidationReport dense_rep =
        cpnet::validate_network(generate_synthetic(dense_cfg));
    REQUIRE(dense_rep.zero_count == 0);
}

TEST_CASE("degenerate single-node request still works") {
    SyntheticConfig cfg;
    cfg.nodes = 1;
    cfg.seed = 77;
    cpnet::NetworkSpec net = generate_synthetic(cfg);
    REQUIRE(net.nodes.size() == 1);
    REQUIRE(net.nodes[0].parents.empty());
    REQUIRE(net.nodes[0].cpt.size() == net.nodes[0].states.size());
    REQUIRE(cpnet::validate_network(net).valid());
}

TEST_CASE("parameter violations are rejected up front") {
    SyntheticConfig cfg; // defaults are valid
    REQUIRE_NOTHROW(generate_synthetic(cfg));

    SyntheticConfig bad = cfg;
    bad.nodes = 0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.min_states = 1;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.max_states = bad.min_states - 1;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.max_parents = -1;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.alpha = 0.0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.zero_fraction = 1.0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);

    bad = cfg;
    bad.zero_fraction = -0.1;
    REQUIRE_THROWS_AS(generate_synthetic(bad), cpnet::InvalidArgument);
}
