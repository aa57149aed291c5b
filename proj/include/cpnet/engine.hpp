#pragma once

// Probability propagation over a junction tree.
//
// Absorption of U from V over separator S replaces belief(U) by
// belief(U) * marg_S(V) / sep(S), where sep(S) is the separator table —
// the value marg_S(U) held at the last consistent state (all-ones right
// after the tree is built).  The separator then stores marg_S(V), so the
// distribute pass reuses the collect pass's marginalization as its
// denominator.  Because the denominators never depend on the belief being
// updated, absorbing from several neighbors is order-independent.
//
// CollectEvidence pulls messages toward the root; the root's table sum is
// then the prior probability of the entered evidence (per connected
// component; the tree's mass is their product).  DistributeEvidence pushes
// messages back out, after which every table holds the (unnormalized)
// posterior marginal of its universe.  Bridge edges between components
// (empty separators) carry no information and are skipped.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/junction_tree.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

struct Case {
    std::vector<Finding> findings;
};

// merge duplicate nodes by intersecting their allowed sets; an empty
// intersection is kept and later zeroes the host clique outright
inline Case canonical_case(const Case& c, const JunctionTree& jt) {
    std::map<int, std::vector<int>> allowed;
    bool first_seen;
    for (const auto& f : c.findings) {
        if (f.node < 0 || f.node >= static_cast<int>(jt.nodes.size()))
            throw InvalidArgument("finding names an unknown node");
        std::int64_t n_states = jt.state_count(f.node);
        std::vector<int> states = f.states;
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
        if (states.empty()) throw InvalidArgument("finding has no allowed states");
        for (int s : states)
            if (s < 0 || s >= n_states) throw InvalidArgument("finding state index out of range");
        auto it = allowed.find(f.node);
        first_seen = (it == allowed.end());
        if (first_seen) {
            allowed.emplace(f.node, std::move(states));
        } else {
            std::vector<int> merged;
            std::set_intersection(it->second.begin(), it->second.end(), states.begin(),
                                  states.end(), std::back_inserter(merged));
            it->second = std::move(merged);
        }
    }
    Case out;
    for (auto& [node, states] : allowed) out.findings.push_back({node, std::move(states)});
    return out;
}

// Enter every finding into exactly one clique containing its node (the
// smallest state-space clique, lowest index on ties).
inline void enter_case(JunctionTree& jt, const Case& c) {
    Case canon = canonical_case(c, jt);
    if (canon.findings.empty()) return; // an empty case changes nothing
    for (const auto& f : canon.findings) {
        int host = jt.host_clique({f.node});
        if (host < 0) throw InvalidArgument("no clique contains the finding's node");
        BeliefTable& t = jt.cliques[static_cast<std::size_t>(host)].table;
        t = f.states.empty() ? scale(t, 0.0) : enter_finding(t, f);
    }
    jt.status = TreeStatus::inconsistent;
    jt.normalized = false;
}

namespace detail {

inline int edge_between(const JunctionTree& jt, int a, int b) {
    for (int e : jt.incident[static_cast<std::size_t>(a)]) {
        const TreeEdge& te = jt.edges[static_cast<std::size_t>(e)];
        if ((te.a == a && te.b == b) || (te.a == b && te.b == a)) return e;
    }
    throw InvalidArgument("cliques are not adjacent in the tree");
}

} // namespace detail

// One absorption step: `to` absorbs from `from` across their edge.
// Bridge edges (empty separator) carry nothing and leave `to` unchanged.
inline void absorb(JunctionTree& jt, int from, int to) {
    TreeEdge& e = jt.edges[static_cast<std::size_t>(detail::edge_between(jt, from, to))];
    if (e.separator.empty()) return;
    BeliefTable marg_v = marginalize(jt.cliques[static_cast<std::size_t>(from)].table, e.separator);
    BeliefTable ratio = divide(marg_v, e.table);
    BeliefTable& t = jt.cliques[static_cast<std::size_t>(to)].table;
    t = multiply(t, ratio);
    e.table = std::move(marg_v);
}

struct PropagationDetail {
    double mu = 0.0; // product of component masses = prior probability of the evidence
    bool excluded = false;
    std::vector<int> clique_component;  // component id per clique
    std::vector<double> component_sums; // mass per component after collect
    std::vector<int> component_root;    // clique holding each component's mass
};

namespace detail {

struct TreeOrder {
    std::vector<int> bfs;    // cliques in breadth-first order from the root
    std::vector<int> parent; // BFS parent clique (-1 at the root)
};

inline TreeOrder tree_order(const JunctionTree& jt, int root) {
    const int k = static_cast<int>(jt.cliques.size());
    if (root < 0 || root >= k) throw InvalidArgument("root clique index out of range");
    TreeOrder ord;
    ord.parent.assign(static_cast<std::size_t>(k), -2);
    ord.parent[static_cast<std::size_t>(root)] = -1;
    ord.bfs.push_back(root);
    for (std::size_t head = 0; head < ord.bfs.size(); ++head) {
        int c = ord.bfs[head];
        for (int e : jt.incident[static_cast<std::size_t>(c)]) {
            const TreeEdge& te = jt.edges[static_cast<std::size_t>(e)];
            int other = te.a == c ? te.b : te.a;
            if (ord.parent[static_cast<std::size_t>(other)] == -2) {
                ord.parent[static_cast<std::size_t>(other)] = c;
                ord.bfs.push_back(other);
            }
        }
    }
    if (ord.bfs.size() != static_cast<std::size_t>(k))
        throw InconsistencyError("junction tree is not connected");
    return ord;
}

// component ids over non-bridge edges, plus each component's clique nearest
// the root (where that component's mass accumulates during collect)
inline void label_components(const JunctionTree& jt, const TreeOrder& ord,
                             PropagationDetail& det) {
    const int k = static_cast<int>(jt.cliques.size());
    det.clique_component.assign(static_cast<std::size_t>(k), -1);
    int issued = 0;
    for (int c : ord.bfs) {
        int p = ord.parent[static_cast<std::size_t>(c)];
        if (p < 0) {
            det.clique_component[static_cast<std::size_t>(c)] = issued;
            det.component_root.push_back(c);
            ++issued;
            continue;
        }
        const TreeEdge& te =
            jt.edges[static_cast<std::size_t>(detail::edge_between(jt, p, c))];
        if (te.separator.empty()) {
            det.clique_component[static_cast<std::size_t>(c)] = issued;
            det.component_root.push_back(c);
            ++issued;
        } else {
            det.clique_component[static_cast<std::size_t>(c)] =
                det.clique_component[static_cast<std::size_t>(p)];
        }
    }
}

} // namespace detail

// Pull evidence toward the root: children are absorbed in reverse
// breadth-first order, so every clique has already absorbed its own subtree
// before its parent absorbs it.
inline PropagationDetail collect_evidence(JunctionTree& jt, int root = 0) {
    detail::TreeOrder ord = detail::tree_order(jt, root);
    for (std::size_t i = ord.bfs.size(); i-- > 1;) {
        int c = ord.bfs[i];
        absorb(jt, /*from=*/c, /*to=*/ord.parent[static_cast<std::size_t>(c)]);
    }
    PropagationDetail det;
    detail::label_components(jt, ord, det);
    det.mu = 1.0;
    for (int rc : det.component_root) {
        double s = table_sum(jt.cliques[static_cast<std::size_t>(rc)].table);
        det.component_sums.push_back(s);
        det.mu *= s;
    }
    det.excluded = (det.mu == 0.0);
    return det;
}

// Push evidence back out from the root in breadth-first order.
inline void distribute_evidence(JunctionTree& jt, int root = 0) {
    detail::TreeOrder ord = detail::tree_order(jt, root);
    for (std::size_t i = 1; i < ord.bfs.size(); ++i) {
        int c = ord.bfs[i];
        absorb(jt, /*from=*/ord.parent[static_cast<std::size_t>(c)], /*to=*/c);
    }
}

struct PropagateOptions {
    int root = 0;
    bool normalize = true;
};

// Full propagation: collect, read off the normalization constant, distribute,
// then (optionally) normalize each component by its own mass.  A zero mass
// means the entered case is excluded; all tables are left all-zero then.
inline PropagationDetail global_propagate(JunctionTree& jt, PropagateOptions opts = {}) {
    PropagationDetail det = collect_evidence(jt, opts.root);
    if (det.excluded) {
        for (auto& c : jt.cliques) c.table = scale(c.table, 0.0);
        for (auto& e : jt.edges)
            if (!e.separator.empty()) e.table = scale(e.table, 0.0);
        jt.status = TreeStatus::consistent;
        jt.normalized = false;
        jt.total_mass = 0.0;
        return det;
    }
    distribute_evidence(jt, opts.root);
    jt.status = TreeStatus::consistent;
    if (opts.normalize) {
        for (std::size_t c = 0; c < jt.cliques.size(); ++c) {
            double s = det.component_sums[static_cast<std::size_t>(
                det.clique_component[c])];
            jt.cliques[c].table = scale(jt.cliques[c].table, 1.0 / s);
        }
        for (auto& e : jt.edges) {
            if (e.separator.empty()) continue;
            double s = det.component_sums[static_cast<std::size_t>(
                det.clique_component[static_cast<std::size_t>(e.a)])];
            e.table = scale(e.table, 1.0 / s);
        }
        jt.normalized = true;
        jt.total_mass = 1.0;
    } else {
        jt.normalized = false;
        jt.total_mass = det.mu;
    }
    return det;
}

// Posterior marginal of one node read from its smallest host clique.
inline std::vector<double> query_marginal(const JunctionTree& jt, int node) {
    if (jt.status != TreeStatus::consistent)
        throw InvalidArgument("query requires a consistent tree");
    if (node < 0 || node >= static_cast<int>(jt.nodes.size()))
        throw InvalidArgument("query names an unknown node");
    int host = jt.host_clique({node});
    BeliefTable m = marginalize(jt.cliques[static_cast<std::size_t>(host)].table, {node});
    double s = table_sum(m);
    if (s == 0.0) throw ExcludedCaseError("zero normalization constant: the case is excluded");
    std::vector<double> out = m.dense_values();
    for (double& v : out) v /= s;
    return out;
}

struct CaseResult {
    PropagationDetail detail;
    JunctionTree tree;
};

// Propagate a case on a copy of the tree (the input stays untouched).
inline CaseResult run_case(const JunctionTree& jt, const Case& c, PropagateOptions opts = {}) {
    CaseResult r{.detail = {}, .tree = jt};
    enter_case(r.tree, c);
    r.detail = global_propagate(r.tree, opts);
    return r;
}

} // namespace cpnet
