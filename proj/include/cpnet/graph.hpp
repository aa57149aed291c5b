#pragma once

// Moral-graph construction and triangulation.
//
// Three elimination heuristics are offered:
//   max-card    maximum cardinality search; the visit order reversed is the
//               elimination order (zero fill on an already-chordal graph)
//   min-size    greedy: eliminate the vertex with the fewest-node
//               elimination clique
//   min-weight  greedy: eliminate the vertex whose elimination clique has
//               the smallest state-space product
// All ties break toward the lowest node index.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/network.hpp"

namespace cpnet {

struct UndirectedGraph {
    int n = 0;
    std::vector<std::vector<char>> adj;

    explicit UndirectedGraph(int vertices = 0)
        : n(vertices), adj(static_cast<std::size_t>(vertices),
                           std::vector<char>(static_cast<std::size_t>(vertices), 0)) {}

    void add_edge(int a, int b) {
        if (a == b) return;
        adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
        adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
    }

    bool has_edge(int a, int b) const {
        return adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (has_edge(a, b)) out.emplace_back(a, b);
        return out;
    }
};

// drop arrow directions and marry every pair of co-parents
inline UndirectedGraph moralize(const NetworkSpec& net) {
    UndirectedGraph g(static_cast<int>(net.nodes.size()));
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        std::vector<int> parents;
        for (const auto& pid : net.nodes[i].parents) parents.push_back(net.node_index(pid));
        for (int p : parents) g.add_edge(p, static_cast<int>(i));
        for (std::size_t a = 0; a < parents.size(); ++a)
            for (std::size_t b = a + 1; b < parents.size(); ++b) g.add_edge(parents[a], parents[b]);
    }
    return g;
}

enum class Heuristic { max_card, min_size, min_weight };

inline std::string heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::max_card: return "max-card";
        case Heuristic::min_size: return "min-size";
        case Heuristic::min_weight: return "min-weight";
    }
    return "?";
}

inline Heuristic heuristic_from_name(const std::string& name) {
    if (name == "max-card") return Heuristic::max_card;
    if (name == "min-size") return Heuristic::min_size;
    if (name == "min-weight") return Heuristic::min_weight;
    throw InvalidArgument("unknown heuristic: " + name);
}

struct TriangulationResult {
    Heuristic heuristic = Heuristic::min_weight;
    std::vector<int> elimination_order;          // order the vertices were eliminated
    std::vector<std::pair<int, int>> fill_edges; // chords added, (lo, hi) pairs
    // elimination clique of each step: the vertex plus its not-yet-eliminated
    // neighbors in the filled graph, sorted ascending
    std::vector<std::vector<int>> elimination_cliques;
};

namespace detail {

// simulate elimination in the given order, recording fill and cliques
inline void run_elimination(UndirectedGraph work, const std::vector<int>& order,
                            TriangulationResult& out) {
    std::vector<char> gone(static_cast<std::size_t>(work.n), 0);
    for (int v : order) {
        std::vector<int> nbrs;
        for (int u = 0; u < work.n; ++u)
            if (!gone[static_cast<std::size_t>(u)] && work.has_edge(v, u)) nbrs.push_back(u);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                if (!work.has_edge(nbrs[a], nbrs[b])) {
                    work.add_edge(nbrs[a], nbrs[b]);
                    out.fill_edges.emplace_back(std::min(nbrs[a], nbrs[b]),
                                                std::max(nbrs[a], nbrs[b]));
                }
        std::vector<int> clique = nbrs;
        clique.push_back(v);
        std::sort(clique.begin(), clique.end());
        out.elimination_cliques.push_back(std::move(clique));
        out.elimination_order.push_back(v);
        gone[static_cast<std::size_t>(v)] = 1;
    }
}

inline std::vector<int> max_cardinality_order(const UndirectedGraph& g, int start) {
    std::vector<int> visit;
    std::vector<char> numbered(static_cast<std::size_t>(g.n), 0);
    std::vector<int> weight(static_cast<std::size_t>(g.n), 0);
    for (int step = 0; step < g.n; ++step) {
        int pick = -1;
        if (step == 0 && start >= 0 && start < g.n) {
            pick = start;
        } else {
            for (int v = 0; v < g.n; ++v) {
                if (numbered[static_cast<std::size_t>(v)]) continue;
                if (pick < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(pick)])
                    pick = v;
            }
        }
        numbered[static_cast<std::size_t>(pick)] = 1;
        visit.push_back(pick);
        for (int u = 0; u < g.n; ++u)
            if (!numbered[static_cast<std::size_t>(u)] && g.has_edge(pick, u))
                ++weight[static_cast<std::size_t>(u)];
    }
    return visit;
}

} // namespace detail

inline TriangulationResult triangulate(const UndirectedGraph& g, const NetworkSpec& net,
                                       Heuristic h, int max_card_start = 0) {
    if (g.n != static_cast<int>(net.nodes.size()))
        throw InvalidArgument("triangulate: graph and network node counts differ");
    TriangulationResult out;
    out.heuristic = h;
    if (g.n == 0) return out;

    if (h == Heuristic::max_card) {
        if (max_card_start < 0 || max_card_start >= g.n)
            throw InvalidArgument("triangulate: start vertex out of range");
        std::vector<int> visit = detail::max_cardinality_order(g, max_card_start);
        std::reverse(visit.begin(), visit.end()); // last numbered is eliminated first
        detail::run_elimination(g, visit, out);
        return out;
    }

    UndirectedGraph work = g;
    std::vector<char> gone(static_cast<std::size_t>(g.n), 0);
    std::vector<int> order;
    for (int step = 0; step < g.n; ++step) {
        int pick = -1;
        double best = 0.0;
        for (int v = 0; v < g.n; ++v) {
            if (gone[static_cast<std::size_t>(v)]) continue;
            double cost;
            if (h == Heuristic::min_size) {
                int sz = 1;
                for (int u = 0; u < g.n; ++u)
                    if (!gone[static_cast<std::size_t>(u)] && work.has_edge(v, u)) ++sz;
                cost = sz;
            } else {
                cost = static_cast<double>(net.state_count(v));
                for (int u = 0; u < g.n; ++u)
                    if (!gone[static_cast<std::size_t>(u)] && work.has_edge(v, u))
                        cost *= static_cast<double>(net.state_count(u));
            }
            if (pick < 0 || cost < best) {
                pick = v;
                best = cost;
            }
        }
        std::vector<int> nbrs;
        for (int u = 0; u < g.n; ++u)
            if (!gone[static_cast<std::size_t>(u)] && work.has_edge(pick, u)) nbrs.push_back(u);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                if (!work.has_edge(nbrs[a], nbrs[b])) {
                    work.add_edge(nbrs[a], nbrs[b]);
                    out.fill_edges.emplace_back(std::min(nbrs[a], nbrs[b]),
                                                std::max(nbrs[a], nbrs[b]));
                }
        std::vector<int> clique = nbrs;
        clique.push_back(pick);
        std::sort(clique.begin(), clique.end());
        out.elimination_cliques.push_back(std::move(clique));
        order.push_back(pick);
        gone[static_cast<std::size_t>(pick)] = 1;
    }
    out.elimination_order = std::move(order);
    return out;
}

inline UndirectedGraph filled_graph(const UndirectedGraph& g, const TriangulationResult& tr) {
    UndirectedGraph out = g;
    for (auto [a, b] : tr.fill_edges) out.add_edge(a, b);
    return out;
}

// A graph is chordal exactly when re-triangulating it via max-cardinality
// search adds no fill edges.
inline bool is_chordal(const UndirectedGraph& g, const NetworkSpec& net) {
    if (g.n == 0) return true;
    TriangulationResult tr = triangulate(g, net, Heuristic::max_card, 0);
    return tr.fill_edges.empty();
}

// Maximal cliques of the filled graph, taken from the elimination cliques.
// Output order: ascending minimum elimination-order position of the clique's
// members (which is unique per maximal clique).
inline std::vector<std::vector<int>> extract_cliques(const TriangulationResult& tr) {
    const auto& cand = tr.elimination_cliques;
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < cand.size() && maximal; ++j) {
            if (j == i || cand[j].size() <= cand[i].size()) continue;
            if (std::includes(cand[j].begin(), cand[j].end(), cand[i].begin(), cand[i].end()))
                maximal = false;
        }
        if (maximal) out.push_back(cand[i]);
    }
    // elimination cliques are emitted in elimination order, and a maximal
    // clique shows up exactly once, at its earliest-eliminated member, so the
    // candidate order is already the required min-position order
    return out;
}

} // namespace cpnet
