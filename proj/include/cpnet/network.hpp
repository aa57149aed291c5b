#pragma once

// Causal probabilistic network model: nodes with discrete states, parent
// links, and a conditional probability table per node.
//
// CPT layout: one row per parent configuration, rows ordered row-major over
// the parents in declared order with the LAST parent varying fastest; within
// a row, the node's own states in declared order.  Equivalently, the flat
// vector is a belief table over (parents..., node).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpnet/errors.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

struct NodeSpec {
    std::string id;
    std::vector<std::string> states;
    std::vector<std::string> parents;
    std::vector<double> cpt;
};

struct NetworkSpec {
    std::string name;
    std::vector<NodeSpec> nodes;

    int node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }

    std::int64_t state_count(int i) const {
        return static_cast<std::int64_t>(nodes[static_cast<std::size_t>(i)].states.size());
    }

    int state_index(int node, const std::string& label) const {
        const auto& st = nodes[static_cast<std::size_t>(node)].states;
        for (std::size_t s = 0; s < st.size(); ++s)
            if (st[s] == label) return static_cast<int>(s);
        return -1;
    }

    // (parents in declared order, node) — the CPT's scope
    std::vector<int> family_scope(int i) const {
        std::vector<int> scope;
        for (const auto& pid : nodes[static_cast<std::size_t>(i)].parents)
            scope.push_back(node_index(pid));
        scope.push_back(i);
        return scope;
    }

    BeliefTable cpt_table(int i) const {
        std::vector<int> scope = family_scope(i);
        std::vector<std::int64_t> shape;
        for (int n : scope) shape.push_back(state_count(n));
        return BeliefTable::dense(std::move(scope), std::move(shape),
                                  nodes[static_cast<std::size_t>(i)].cpt);
    }

    std::vector<int> children_of(int i) const {
        std::vector<int> out;
        const std::string& id = nodes[static_cast<std::size_t>(i)].id;
        for (std::size_t j = 0; j < nodes.size(); ++j)
            for (const auto& pid : nodes[j].parents)
                if (pid == id) {
                    out.push_back(static_cast<int>(j));
                    break;
                }
        return out;
    }
};

inline NetworkSpec parse_network(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
        throw ParseError("network: expected an object with a \"nodes\" array");
    NetworkSpec net;
    net.name = doc.value("name", std::string{});
    for (const auto& jn : doc["nodes"]) {
        if (!jn.is_object()) throw ParseError("network: node entries must be objects");
        NodeSpec node;
        if (!jn.contains("id") || !jn["id"].is_string())
            throw ParseError("network: node \"id\" must be a string");
        node.id = jn["id"].get<std::string>();
        if (net.node_index(node.id) >= 0)
            throw ParseError("network: duplicate node id \"" + node.id + "\"");
        if (!jn.contains("states") || !jn["states"].is_array())
            throw ParseError("network: node \"" + node.id + "\" needs a \"states\" array");
        for (const auto& js : jn["states"]) {
            if (!js.is_string())
                throw ParseError("network: states of \"" + node.id + "\" must be strings");
            node.states.push_back(js.get<std::string>());
        }
        if (jn.contains("parents")) {
            if (!jn["parents"].is_array())
                throw ParseError("network: \"parents\" of \"" + node.id + "\" must be an array");
            for (const auto& jp : jn["parents"]) {
                if (!jp.is_string())
                    throw ParseError("network: parents of \"" + node.id + "\" must be strings");
                node.parents.push_back(jp.get<std::string>());
            }
        }
        if (!jn.contains("cpt") || !jn["cpt"].is_array())
            throw ParseError("network: node \"" + node.id + "\" needs a \"cpt\" array");
        for (const auto& jv : jn["cpt"]) {
            if (!jv.is_number())
                throw ParseError("network: cpt of \"" + node.id + "\" must hold numbers");
            node.cpt.push_back(jv.get<double>());
        }
        net.nodes.push_back(std::move(node));
    }
    // parent ids must resolve (forward references are fine)
    for (const auto& node : net.nodes)
        for (const auto& pid : node.parents) {
            if (net.node_index(pid) < 0)
                throw ParseError("network: node \"" + node.id + "\" lists unknown parent \"" + pid +
                                 "\"");
            if (pid == node.id)
                throw ParseError("network: node \"" + node.id + "\" lists itself as a parent");
        }
    return net;
}

inline std::string serialize_network(const NetworkSpec& net) {
    nlohmann::ordered_json doc;
    doc["name"] = net.name;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : net.nodes) {
        nlohmann::ordered_json jn;
        jn["id"] = node.id;
        jn["states"] = node.states;
        jn["parents"] = node.parents;
        jn["cpt"] = node.cpt;
        doc["nodes"].push_back(std::move(jn));
    }
    return doc.dump() + "\n";
}

struct Violation {
    std::string kind; // "states" | "cpt-length" | "entry-range" | "row-sum" | "cycle"
    std::string node; // offending node id ("" for cycle)
    std::int64_t index = -1; // entry index or parent-configuration index
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::int64_t parameter_count = 0;
    std::int64_t zero_count = 0;
    bool valid() const { return violations.empty(); }
};

inline ValidationReport validate_network(const NetworkSpec& net) {
    ValidationReport rep;
    for (const auto& node : net.nodes) {
        rep.parameter_count += static_cast<std::int64_t>(node.cpt.size());
        for (double v : node.cpt) rep.zero_count += (v == 0.0);

        if (node.states.size() < 2)
            rep.violations.push_back({"states", node.id, -1,
                                      "node \"" + node.id + "\" needs at least 2 states"});
        for (std::size_t a = 0; a < node.states.size(); ++a)
            for (std::size_t b = a + 1; b < node.states.size(); ++b)
                if (node.states[a] == node.states[b])
                    rep.violations.push_back({"states", node.id, static_cast<std::int64_t>(b),
                                              "node \"" + node.id + "\" repeats state label \"" +
                                                  node.states[a] + "\""});

        std::int64_t expected = static_cast<std::int64_t>(node.states.size());
        bool parents_ok = true;
        for (const auto& pid : node.parents) {
            int p = net.node_index(pid);
            if (p < 0) { parents_ok = false; break; }
            expected *= net.state_count(p);
        }
        if (!parents_ok) continue;
        if (static_cast<std::int64_t>(node.cpt.size()) != expected) {
            rep.violations.push_back({"cpt-length", node.id, static_cast<std::int64_t>(node.cpt.size()),
                                      "node \"" + node.id + "\" cpt holds " +
                                          std::to_string(node.cpt.size()) + " entries, expected " +
                                          std::to_string(expected)});
            continue;
        }
        for (std::size_t i = 0; i < node.cpt.size(); ++i) {
            double v = node.cpt[i];
            if (!(v >= 0.0 && v <= 1.0))
                rep.violations.push_back({"entry-range", node.id, static_cast<std::int64_t>(i),
                                          "node \"" + node.id + "\" cpt entry " + std::to_string(i) +
                                              " outside [0, 1]"});
        }
        std::size_t row_len = node.states.size();
        for (std::size_t r = 0; r * row_len < node.cpt.size(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < row_len; ++c) s += node.cpt[r * row_len + c];
            if (!(s > 1.0 - 1e-9 && s < 1.0 + 1e-9))
                rep.violations.push_back({"row-sum", node.id, static_cast<std::int64_t>(r),
                                          "node \"" + node.id + "\" row " + std::to_string(r) +
                                              " sums to " + std::to_string(s)});
        }
    }

    // acyclicity via DFS over parent->child edges; report the first cycle found
    const int n = static_cast<int>(net.nodes.size());
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (const auto& pid : net.nodes[static_cast<std::size_t>(i)].parents) {
            int p = net.node_index(pid);
            if (p >= 0) children[static_cast<std::size_t>(p)].push_back(i);
        }
    std::vector<int> color(static_cast<std::size_t>(n), 0); // 0 new, 1 on stack, 2 done
    std::vector<int> parent_in_dfs(static_cast<std::size_t>(n), -1);
    bool found_cycle = false;
    for (int start = 0; start < n && !found_cycle; ++start) {
        if (color[static_cast<std::size_t>(start)] != 0) continue;
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        color[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children[static_cast<std::size_t>(v)].size()) {
                int w = children[static_cast<std::size_t>(v)][next++];
                if (color[static_cast<std::size_t>(w)] == 0) {
                    color[static_cast<std::size_t>(w)] = 1;
                    parent_in_dfs[static_cast<std::size_t>(w)] = v;
                    stack.emplace_back(w, 0);
                } else if (color[static_cast<std::size_t>(w)] == 1) {
                    // w is an ancestor of v on the stack; the chain v -> ... -> w
                    // plus the back edge closes the cycle
                    std::string cycle = net.nodes[static_cast<std::size_t>(w)].id;
                    for (int u = v; u != -1; u = parent_in_dfs[static_cast<std::size_t>(u)]) {
                        cycle = net.nodes[static_cast<std::size_t>(u)].id + " -> " + cycle;
                        if (u == w) break;
                    }
                    rep.violations.push_back({"cycle", "", -1, "cycle: " + cycle});
                    found_cycle = true;
                    stack.clear();
                    break;
                }
            } else {
                color[static_cast<std::size_t>(v)] = 2;
                stack.pop_back();
            }
        }
    }
    return rep;
}

} // namespace cpnet
