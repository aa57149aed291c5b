#pragma once

// Junction tree of belief universes: maximal cliques of the triangulated
// moral graph joined by a maximal spanning tree over separator cardinality.
//
// A disconnected moral graph yields one subtree per component; the subtrees
// are linked by zero-separator bridge edges whose tables stay the unit
// scalar, so the result is always a single tree structure.

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/graph.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

struct NodeMeta {
    std::string id;
    std::vector<std::string> states;
};

struct Clique {
    std::vector<int> nodes; // sorted ascending
    BeliefTable table;
};

struct TreeEdge {
    int a = -1; // clique already in the tree when the edge was added
    int b = -1; // clique the edge attached
    std::vector<int> separator; // sorted; empty marks a component bridge
    BeliefTable table;
};

enum class TreeStatus { inconsistent, consistent };

struct CliqueApproxRecord {
    double delta = 0.0;        // annihilation threshold actually applied
    double removed_mass = 0.0; // local belief mass zeroed in this clique
    double pre_sum = 0.0;      // table sum before annihilation
};

struct ApproximationReport {
    double epsilon = 0.0;
    std::string method; // "halving" | "sort"
    double global_error = 0.0; // e = 1 - mu_A
    std::vector<CliqueApproxRecord> cliques;
    // P(f and not-A) per node state: probability mass the annihilation
    // removed from each single-state finding
    std::vector<std::vector<double>> finding_error;
};

struct JunctionTree {
    std::string network_name;
    Heuristic heuristic = Heuristic::min_weight;
    std::vector<NodeMeta> nodes;
    std::vector<Clique> cliques;
    std::vector<TreeEdge> edges;
    std::vector<std::vector<int>> incident; // edge ids touching each clique
    TreeStatus status = TreeStatus::inconsistent;
    bool normalized = false;
    double total_mass = 0.0;
    std::optional<ApproximationReport> approx;

    std::int64_t state_count(int node) const {
        return static_cast<std::int64_t>(nodes[static_cast<std::size_t>(node)].states.size());
    }

    std::int64_t clique_space(const std::vector<int>& members) const {
        std::int64_t s = 1;
        for (int v : members) s *= state_count(v);
        return s;
    }

    void rebuild_incident() {
        incident.assign(cliques.size(), {});
        for (std::size_t e = 0; e < edges.size(); ++e) {
            incident[static_cast<std::size_t>(edges[e].a)].push_back(static_cast<int>(e));
            incident[static_cast<std::size_t>(edges[e].b)].push_back(static_cast<int>(e));
        }
    }

    int node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }

    int state_index(int node, const std::string& label) const {
        const auto& st = nodes[static_cast<std::size_t>(node)].states;
        for (std::size_t s = 0; s < st.size(); ++s)
            if (st[s] == label) return static_cast<int>(s);
        return -1;
    }

    // smallest state-space clique containing the node set; lowest index wins ties
    int host_clique(const std::vector<int>& members) const {
        int best = -1;
        std::int64_t best_space = 0;
        for (std::size_t c = 0; c < cliques.size(); ++c) {
            const auto& cl = cliques[c].nodes;
            bool contains = std::includes(cl.begin(), cl.end(), members.begin(), members.end());
            if (!contains) continue;
            std::int64_t space = clique_space(cl);
            if (best < 0 || space < best_space) {
                best = static_cast<int>(c);
                best_space = space;
            }
        }
        return best;
    }
};

namespace detail {

// every clique on the path between two cliques must contain their intersection
inline void check_junction_property(const JunctionTree& jt) {
    const int k = static_cast<int>(jt.cliques.size());
    for (int i = 0; i < k; ++i) {
        // BFS parents from i
        std::vector<int> via(static_cast<std::size_t>(k), -2);
        via[static_cast<std::size_t>(i)] = -1;
        std::queue<int> q;
        q.push(i);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            for (int e : jt.incident[static_cast<std::size_t>(c)]) {
                int other = jt.edges[static_cast<std::size_t>(e)].a == c
                                ? jt.edges[static_cast<std::size_t>(e)].b
                                : jt.edges[static_cast<std::size_t>(e)].a;
                if (via[static_cast<std::size_t>(other)] == -2) {
                    via[static_cast<std::size_t>(other)] = c;
                    q.push(other);
                }
            }
        }
        for (int j = i + 1; j < k; ++j) {
            std::vector<int> inter;
            std::set_intersection(jt.cliques[static_cast<std::size_t>(i)].nodes.begin(),
                                  jt.cliques[static_cast<std::size_t>(i)].nodes.end(),
                                  jt.cliques[static_cast<std::size_t>(j)].nodes.begin(),
                                  jt.cliques[static_cast<std::size_t>(j)].nodes.end(),
                                  std::back_inserter(inter));
            if (inter.empty()) continue;
            for (int c = j; c != i; c = via[static_cast<std::size_t>(c)]) {
                if (c < 0) throw InconsistencyError("junction tree is not connected");
                const auto& cl = jt.cliques[static_cast<std::size_t>(c)].nodes;
                if (!std::includes(cl.begin(), cl.end(), inter.begin(), inter.end()))
                    throw InconsistencyError("junction property violated between cliques " +
                                             std::to_string(i) + " and " + std::to_string(j));
            }
        }
    }
}

} // namespace detail

// Maximal spanning tree over the clique graph.  Edge weight is separator
// cardinality; ties prefer the smaller separator state-space product, then
// the lowest attaching clique index, then the lowest tree-side index.
// Tables are left empty; initialization fills them.
inline JunctionTree build_junction_tree(const std::vector<std::vector<int>>& cliques,
                                        const NetworkSpec& net, Heuristic heuristic) {
    JunctionTree jt;
    jt.network_name = net.name;
    jt.heuristic = heuristic;
    for (const auto& n : net.nodes) jt.nodes.push_back({n.id, n.states});
    for (const auto& c : cliques) jt.cliques.push_back({c, BeliefTable{}});
    const int k = static_cast<int>(cliques.size());
    if (k == 0) throw InvalidArgument("junction tree needs at least one clique");

    std::vector<char> in_tree(static_cast<std::size_t>(k), 0);
    in_tree[0] = 1;
    for (int added = 1; added < k; ++added) {
        int best_t = -1, best_u = -1;
        std::size_t best_w = 0;
        std::int64_t best_space = 0;
        std::vector<int> best_sep;
        for (int u = 0; u < k; ++u) {
            if (in_tree[static_cast<std::size_t>(u)]) continue;
            for (int t = 0; t < k; ++t) {
                if (!in_tree[static_cast<std::size_t>(t)]) continue;
                std::vector<int> sep;
                std::set_intersection(cliques[static_cast<std::size_t>(t)].begin(),
                                      cliques[static_cast<std::size_t>(t)].end(),
                                      cliques[static_cast<std::size_t>(u)].begin(),
                                      cliques[static_cast<std::size_t>(u)].end(),
                                      std::back_inserter(sep));
                std::int64_t space = jt.clique_space(sep);
                bool better;
                if (best_t < 0)
                    better = true;
                else if (sep.size() != best_w)
                    better = sep.size() > best_w;
                else if (space != best_space)
                    better = space < best_space;
                else if (u != best_u)
                    better = u < best_u;
                else
                    better = t < best_t;
                if (better) {
                    best_t = t;
                    best_u = u;
                    best_w = sep.size();
                    best_space = space;
                    best_sep = std::move(sep);
                }
            }
        }
        jt.edges.push_back({best_t, best_u, best_sep, BeliefTable{}});
        in_tree[static_cast<std::size_t>(best_u)] = 1;
    }
    jt.rebuild_incident();
    detail::check_junction_property(jt);
    return jt;
}

} // namespace cpnet
