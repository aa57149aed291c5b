#pragma once

// Approximation by annihilating small belief-table entries.
//
// Per table, a threshold is chosen so that the mass annihilated locally is
// at most epsilon times the table sum, by one of two selectors:
//   halving     start the threshold at epsilon and halve it until the mass
//               strictly below it fits the budget (0 after the sequence
//               exhausts subnormals, ~1074 halvings)
//   sort-exact  walk the distinct values ascending and take whole
//               equal-value groups while the running mass fits the budget
//
// Annihilation is the same as entering findings that rule the zeroed state
// combinations out, so one unnormalized propagation re-establishes
// consistency; its normalization constant mu_A is the surviving mass, and
// e = 1 - mu_A is the global approximation error.  Before/after marginals
// give P(f and not-A) per single-state finding, from which rigorous
// worst-case posterior-error bounds follow for any later case.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cpnet/engine.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/junction_tree.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

enum class ApproxMethod { halving, sort_exact };

inline std::string approx_method_name(ApproxMethod m) {
    return m == ApproxMethod::halving ? "halving" : "sort";
}

struct ApproximationConfig {
    double epsilon = 0.0;
    ApproxMethod method = ApproxMethod::halving;
};

namespace detail {

inline double sum_below(const BeliefTable& t, double delta) {
    double s = 0.0;
    if (t.is_sparse()) {
        for (const auto& [idx, v] : t.sparse_entries())
            if (v < delta) s += v;
    } else {
        for (double v : t.dense_values())
            if (v < delta) s += v;
    }
    return s;
}

inline double sum_leq(const BeliefTable& t, double cutoff) {
    double s = 0.0;
    if (t.is_sparse()) {
        for (const auto& [idx, v] : t.sparse_entries())
            if (v <= cutoff) s += v;
    } else {
        for (double v : t.dense_values())
            if (v <= cutoff) s += v;
    }
    return s;
}

} // namespace detail

// Threshold for the halving selector, returned on the table's own scale
// (the table is treated as rescaled to sum 1, so the budget is
// epsilon * table sum).
inline double select_threshold_halving(const BeliefTable& t, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidArgument("epsilon must lie in [0, 1)");
    double budget = epsilon * table_sum(t);
    double delta = budget;
    for (;;) {
        if (detail::sum_below(t, delta) <= budget) return delta;
        delta *= 0.5; // hits exact 0 once subnormals are exhausted
    }
}

struct SortSelection {
    double cutoff = -1.0; // annihilate entries <= cutoff; negative selects nothing
    double removed_mass = 0.0;
};

// Sort-exact selector: equal values are taken or left as a whole group.
inline SortSelection select_threshold_sort(const BeliefTable& t, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidArgument("epsilon must lie in [0, 1)");
    double budget = epsilon * table_sum(t);
    std::vector<double> values;
    if (t.is_sparse()) {
        values.reserve(t.sparse_entries().size());
        for (const auto& [idx, v] : t.sparse_entries()) values.push_back(v);
    } else {
        for (double v : t.dense_values())
            if (v != 0.0) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    SortSelection sel;
    double cum = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        double group = 0.0;
        while (j < values.size() && values[j] == values[i]) group += values[j++];
        if (cum + group > budget) break;
        cum += group;
        sel.cutoff = values[i];
        i = j;
    }
    // the budget must also hold for the index-ordered sum the annihilation
    // will actually report; back off a group on rounding disagreement
    while (sel.cutoff >= 0.0) {
        double removed = detail::sum_leq(t, sel.cutoff);
        if (removed <= budget) {
            sel.removed_mass = removed;
            break;
        }
        std::size_t k = 0;
        while (k < values.size() && values[k] < sel.cutoff) ++k;
        sel.cutoff = k == 0 ? -1.0 : values[k - 1];
    }
    if (sel.cutoff < 0.0) sel.removed_mass = 0.0;
    return sel;
}

struct ApproxRun {
    JunctionTree tree;
    ApproximationReport report;
};

// Approximate an evidence-free consistent normalized tree: annihilate per
// clique, re-propagate unnormalized to measure mu_A, record per-finding
// removed mass, renormalize, and compress every table.
inline ApproxRun approximate(const JunctionTree& exact, const ApproximationConfig& cfg) {
    if (exact.status != TreeStatus::consistent || !exact.normalized)
        throw InvalidArgument("approximate requires a consistent, normalized tree");
    ApproxRun run{.tree = exact, .report = {}};
    JunctionTree& jt = run.tree;
    ApproximationReport& rep = run.report;
    rep.epsilon = cfg.epsilon;
    rep.method = approx_method_name(cfg.method);

    // prior marginals P(f) for every single-state finding
    std::vector<std::vector<double>> prior;
    for (std::size_t i = 0; i < jt.nodes.size(); ++i)
        prior.push_back(query_marginal(jt, static_cast<int>(i)));

    double total_removed = 0.0;
    for (auto& c : jt.cliques) {
        CliqueApproxRecord recd;
        recd.pre_sum = table_sum(c.table);
        AnnihilationResult ann;
        if (cfg.method == ApproxMethod::halving) {
            recd.delta = select_threshold_halving(c.table, cfg.epsilon);
            ann = annihilate_below(c.table, recd.delta);
        } else {
            SortSelection sel = select_threshold_sort(c.table, cfg.epsilon);
            recd.delta = std::max(sel.cutoff, 0.0);
            ann = annihilate_leq(c.table, sel.cutoff);
        }
        recd.removed_mass = ann.removed_mass;
        c.table = std::move(ann.table);
        total_removed += recd.removed_mass;
        rep.cliques.push_back(recd);
    }

    if (total_removed == 0.0) {
        // nothing annihilated: the tree is untouched and the identity is exact
        rep.global_error = 0.0;
        for (std::size_t i = 0; i < jt.nodes.size(); ++i)
            rep.finding_error.emplace_back(jt.nodes[i].states.size(), 0.0);
    } else {
        jt.status = TreeStatus::inconsistent;
        jt.normalized = false;
        PropagationDetail det = collect_evidence(jt, 0);
        if (det.excluded) {
            rep.global_error = 1.0;
            for (auto& c : jt.cliques) c.table = scale(c.table, 0.0);
            for (auto& e : jt.edges)
                if (!e.separator.empty()) e.table = scale(e.table, 0.0);
            jt.status = TreeStatus::consistent;
            jt.total_mass = 0.0;
            // everything is annihilated, so each finding loses its full prior
            rep.finding_error = prior;
        } else {
            distribute_evidence(jt, 0);
            rep.global_error = std::min(1.0, std::max(0.0, 1.0 - det.mu));
            for (std::size_t i = 0; i < jt.nodes.size(); ++i) {
                int host = jt.host_clique({static_cast<int>(i)});
                BeliefTable m =
                    marginalize(jt.cliques[static_cast<std::size_t>(host)].table,
                                {static_cast<int>(i)});
                double comp_sum = det.component_sums[static_cast<std::size_t>(
                    det.clique_component[static_cast<std::size_t>(host)])];
                std::vector<double> err(m.dense_values().size(), 0.0);
                for (std::size_t s = 0; s < err.size(); ++s) {
                    double p_and_a = m.dense_values()[s] * (det.mu / comp_sum);
                    err[s] = std::max(0.0, prior[i][s] - p_and_a);
                }
                rep.finding_error.push_back(std::move(err));
            }
            for (std::size_t c = 0; c < jt.cliques.size(); ++c) {
                double s = det.component_sums[static_cast<std::size_t>(det.clique_component[c])];
                jt.cliques[c].table = scale(jt.cliques[c].table, 1.0 / s);
            }
            for (auto& e : jt.edges) {
                if (e.separator.empty()) continue;
                double s = det.component_sums[static_cast<std::size_t>(
                    det.clique_component[static_cast<std::size_t>(e.a)])];
                e.table = scale(e.table, 1.0 / s);
            }
            jt.status = TreeStatus::consistent;
            jt.normalized = true;
            jt.total_mass = 1.0;
        }
    }

    for (auto& c : jt.cliques) c.table = compress(c.table);
    for (auto& e : jt.edges) e.table = compress(e.table);
    jt.approx = rep;
    return run;
}

struct BoundReport {
    double mu_case = 0.0; // P(F | A), the case's probability on the approximated tree
    double coarse = 1.0;  // e / (e + mu_case (1 - e))
    double refined = 1.0; // m / (m + mu_case (1 - e)), m = min_i P(f_i and not-A)
    bool excluded = false;
};

// Worst-case bounds on |P(H|F) - P(H|F,A)| for any hypothesis state H.
inline BoundReport worst_case_bound(const ApproximationReport& rep,
                                    const std::vector<Finding>& findings, double mu_case) {
    BoundReport b;
    b.mu_case = mu_case;
    if (mu_case == 0.0) {
        b.excluded = true;
        return b;
    }
    double e = rep.global_error;
    double survive = mu_case * (1.0 - e);
    b.coarse = (e + survive) == 0.0 ? 0.0 : e / (e + survive);
    double m = e; // an empty case means F is certain, so P(F and not-A) = e
    for (const auto& f : findings) {
        double pf = 0.0;
        for (int s : f.states)
            pf += rep.finding_error[static_cast<std::size_t>(f.node)][static_cast<std::size_t>(s)];
        m = std::min(m, pf);
    }
    b.refined = (m + survive) == 0.0 ? 0.0 : m / (m + survive);
    return b;
}

struct Admissibility {
    bool admissible = false;
    double mu_case = 0.0;
};

// A case is admissible when its evidence keeps positive mass on the tree.
inline Admissibility check_case_admissible(const JunctionTree& jt, const Case& c) {
    JunctionTree work = jt;
    enter_case(work, c);
    PropagationDetail det = collect_evidence(work, 0);
    return {.admissible = !det.excluded, .mu_case = det.mu};
}

} // namespace cpnet
