#pragma once

// Compilation pipeline: moral graph -> triangulation -> maximal cliques ->
// junction tree -> initialized belief tables.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpnet/engine.hpp"
#include "cpnet/graph.hpp"
#include "cpnet/junction_tree.hpp"
#include "cpnet/network.hpp"
#include "cpnet/num_text.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

// Fill the tree with its prior belief tables: every clique and separator
// starts as all-ones, each node's CPT is multiplied into one host clique
// (smallest state space, lowest index on ties), and one full propagation
// renders the tree consistent with total mass 1.
inline void initialize(JunctionTree& jt, const NetworkSpec& net) {
    for (auto& c : jt.cliques) {
        std::vector<std::int64_t> shape;
        for (int v : c.nodes) shape.push_back(jt.state_count(v));
        c.table = BeliefTable::ones(c.nodes, shape);
    }
    for (auto& e : jt.edges) {
        if (e.separator.empty()) {
            e.table = BeliefTable::unit();
            continue;
        }
        std::vector<std::int64_t> shape;
        for (int v : e.separator) shape.push_back(jt.state_count(v));
        e.table = BeliefTable::ones(e.separator, shape);
    }
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        std::vector<int> family = net.family_scope(static_cast<int>(i));
        std::vector<int> sorted = family;
        std::sort(sorted.begin(), sorted.end());
        int host = jt.host_clique(sorted);
        if (host < 0)
            throw InconsistencyError("no clique contains the family of node \"" +
                                     net.nodes[i].id + "\"");
        BeliefTable& t = jt.cliques[static_cast<std::size_t>(host)].table;
        t = multiply(t, net.cpt_table(static_cast<int>(i)));
    }
    jt.status = TreeStatus::inconsistent;
    global_propagate(jt, {.root = 0, .normalize = true});
}

inline JunctionTree compile_network(const NetworkSpec& net, Heuristic heuristic,
                                    int max_card_start = 0) {
    if (net.nodes.empty()) throw InvalidArgument("cannot compile an empty network");
    UndirectedGraph moral = moralize(net);
    TriangulationResult tr = triangulate(moral, net, heuristic, max_card_start);
    std::vector<std::vector<int>> cliques = extract_cliques(tr);
    JunctionTree jt = build_junction_tree(cliques, net, heuristic);
    initialize(jt, net);
    return jt;
}

struct TreeStats {
    std::int64_t clique_count = 0;
    std::map<std::int64_t, std::int64_t> size_histogram; // clique size -> count
    std::int64_t total_state_space = 0;
    std::int64_t max_clique_state_space = 0;
    double zero_fraction = 0.0; // zero entries across all clique tables
};

inline TreeStats tree_stats(const JunctionTree& jt) {
    TreeStats st;
    st.clique_count = static_cast<std::int64_t>(jt.cliques.size());
    std::int64_t entries = 0, zeros = 0;
    for (const auto& c : jt.cliques) {
        st.size_histogram[static_cast<std::int64_t>(c.nodes.size())] += 1;
        std::int64_t space = jt.clique_space(c.nodes);
        st.total_state_space += space;
        st.max_clique_state_space = std::max(st.max_clique_state_space, space);
        entries += space;
        zeros += space - c.table.nonzero_count();
    }
    st.zero_fraction = entries == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(entries);
    return st;
}

inline std::string stats_to_kv(const TreeStats& st) {
    std::string hist;
    for (const auto& [size, count] : st.size_histogram) {
        if (!hist.empty()) hist += ";";
        hist += std::to_string(size) + ":" + std::to_string(count);
    }
    std::string out;
    out += "clique_count=" + std::to_string(st.clique_count) + "\n";
    out += "size_histogram=" + hist + "\n";
    out += "total_state_space=" + std::to_string(st.total_state_space) + "\n";
    out += "max_clique_state_space=" + std::to_string(st.max_clique_state_space) + "\n";
    out += "zero_fraction=" + format_double(st.zero_fraction) + "\n";
    return out;
}

} // namespace cpnet
