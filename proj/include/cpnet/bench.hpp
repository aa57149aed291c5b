#pragma once

// Benchmark harness: compile a network once, then for each epsilon in the
// sweep approximate a fresh copy of the exact tree, record the global error
// and storage (compressed payload vs dense equivalent), and evaluate a
// seeded set of random cases — mu_case, worst-case bounds, and observed
// posterior error against the unapproximated tree (and against the
// brute-force oracle when the joint state space is small enough).
//
// Wall-clock timing is opt-in (time_reps > 0, clamped to at least 5
// repetitions; the median per case is averaged over the case set).  With
// timing off every emitted CSV byte is a pure function of (network, config),
// so a fixed seed reproduces the file exactly.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpnet/approx.hpp"
#include "cpnet/compiler.hpp"
#include "cpnet/engine.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/network.hpp"
#include "cpnet/num_text.hpp"
#include "cpnet/oracle.hpp"
#include "cpnet/serialize.hpp"
#include "cpnet/synthetic.hpp"

namespace cpnet {

struct BenchConfig {
    std::vector<double> epsilons;  // 0 is always included as the baseline
    ApproxMethod method = ApproxMethod::halving;
    Heuristic heuristic = Heuristic::max_card;
    int max_card_start = 0;
    int cases = 5;
    int findings_per_case = 2;
    std::vector<int> observable;   // candidate finding nodes; empty = leaf nodes
    int time_reps = 0;             // 0 disables timing columns; >0 is clamped to >= 5
    std::uint64_t seed = 1;
};

struct BenchCaseRecord {
    int case_index = 0;
    Case findings;
    double mu_case = 0.0;
    double coarse = 1.0;
    double refined = 1.0;
    bool excluded = false;
    std::optional<double> max_err;         // vs the unapproximated tree
    std::optional<double> mean_err;
    std::optional<double> oracle_max_err;  // vs brute-force enumeration
    std::optional<double> oracle_mean_err;
};

struct BenchEpsilonBlock {
    double epsilon = 0.0;
    double global_error = 0.0;
    std::int64_t payload_bytes = 0;
    std::int64_t dense_bytes = 0;
    std::optional<double> prop_seconds;  // mean over cases of per-case median
    std::optional<double> time_ratio;    // vs the epsilon = 0 baseline
    std::vector<BenchCaseRecord> cases;
};

struct BenchResult {
    std::string network;
    std::string heuristic;
    std::vector<BenchEpsilonBlock> blocks; // ascending epsilon, baseline first
};

namespace detail {

inline std::vector<Case> bench_cases(const NetworkSpec& net, const JunctionTree& exact,
                                     const BenchConfig& cfg) {
    std::vector<int> observable = cfg.observable;
    if (observable.empty()) {
        for (std::size_t i = 0; i < net.nodes.size(); ++i)
            if (net.children_of(static_cast<int>(i)).empty())
                observable.push_back(static_cast<int>(i));
    }
    for (int v : observable)
        if (v < 0 || v >= static_cast<int>(net.nodes.size()))
            throw InvalidArgument("bench: observable node out of range");
    std::sort(observable.begin(), observable.end());
    observable.erase(std::unique(observable.begin(), observable.end()), observable.end());
    if (observable.empty())
        throw InvalidArgument("bench: no observable nodes to draw findings from");

    SyntheticRng rng(cfg.seed);
    int per_case = std::min<int>(cfg.findings_per_case, static_cast<int>(observable.size()));
    std::vector<Case> cases;
    for (int k = 0; k < cfg.cases; ++k) {
        Case chosen;
        for (int attempt = 0; attempt < 100; ++attempt) {
            Case c;
            std::vector<int> picks = rng.choose(per_case, static_cast<int>(observable.size()));
            std::sort(picks.begin(), picks.end());
            for (int p : picks) {
                int node = observable[static_cast<std::size_t>(p)];
                int states = static_cast<int>(net.nodes[static_cast<std::size_t>(node)].states.size());
                c.findings.push_back({node, {static_cast<int>(rng.below(states))}});
            }
            chosen = c;
            if (check_case_admissible(exact, c).admissible) break;
        }
        cases.push_back(std::move(chosen));
    }
    return cases;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double timed_propagation(const JunctionTree& tree, const Case& c, int reps) {
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        JunctionTree work = tree;
        enter_case(work, c);
        auto t0 = std::chrono::steady_clock::now();
        global_propagate(work);
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return median(std::move(samples));
}

inline std::string csv_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
}

} // namespace detail

inline BenchResult run_bench(const NetworkSpec& net, const BenchConfig& cfg) {
    if (cfg.cases < 0) throw InvalidArgument("bench: case count must be >= 0");
    if (cfg.findings_per_case < 1)
        throw InvalidArgument("bench: findings per case must be >= 1");
    std::vector<double> eps = cfg.epsilons;
    eps.push_back(0.0);
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    for (double e : eps)
        if (!(e >= 0.0 && e < 1.0)) throw InvalidArgument("bench: epsilon must lie in [0, 1)");
    int reps = cfg.time_reps > 0 ? std::max(cfg.time_reps, 5) : 0;

    JunctionTree exact = compile_network(net, cfg.heuristic, cfg.max_card_start);
    std::vector<Case> cases = cfg.cases > 0 ? detail::bench_cases(net, exact, cfg)
                                            : std::vector<Case>{};

    std::optional<JointTable> joint;
    std::int64_t joint_size = 1;
    for (const auto& n : net.nodes) {
        joint_size *= static_cast<std::int64_t>(n.states.size());
        if (joint_size > oracle_detail::kMaxJoint) break;
    }
    if (joint_size <= oracle_detail::kMaxJoint) joint = enumerate_joint(net);

    BenchResult result;
    result.network = net.name;
    result.heuristic = heuristic_name(cfg.heuristic);
    double baseline_seconds = 0.0;

    for (double epsilon : eps) {
        ApproxRun run = approximate(exact, {.epsilon = epsilon, .method = cfg.method});
        BenchEpsilonBlock block;
        block.epsilon = epsilon;
        block.global_error = run.report.global_error;
        block.payload_bytes = tree_payload_bytes(run.tree);
        block.dense_bytes = tree_dense_bytes(run.tree);

        double second_sum = 0.0;
        for (std::size_t k = 0; k < cases.size(); ++k) {
            const Case& c = cases[k];
            BenchCaseRecord rec;
            rec.case_index = static_cast<int>(k);
            rec.findings = c;
            Admissibility adm = check_case_admissible(run.tree, c);
            rec.mu_case = adm.mu_case;
            BoundReport bound = worst_case_bound(run.report, c.findings, adm.mu_case);
            rec.coarse = bound.coarse;
            rec.refined = bound.refined;
            rec.excluded = bound.excluded;
            if (!rec.excluded) {
                CaseResult approx_r = run_case(run.tree, c);
                std::vector<std::vector<double>> approx_post;
                for (std::size_t i = 0; i < net.nodes.size(); ++i)
                    approx_post.push_back(query_marginal(approx_r.tree, static_cast<int>(i)));
                CaseResult exact_r = run_case(exact, c);
                if (exact_r.detail.mu > 0.0) {
                    double max_e = 0.0, sum_e = 0.0;
                    std::int64_t n_states = 0;
                    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
                        std::vector<double> pe = query_marginal(exact_r.tree, static_cast<int>(i));
                        for (std::size_t s = 0; s < pe.size(); ++s) {
                            double d = std::abs(approx_post[i][s] - pe[s]);
                            max_e = std::max(max_e, d);
                            sum_e += d;
                            ++n_states;
                        }
                    }
                    rec.max_err = max_e;
                    rec.mean_err = sum_e / static_cast<double>(n_states);
                }
                if (joint) {
                    try {
                        auto post = oracle_all_posteriors(net, *joint, c.findings);
                        double max_e = 0.0, sum_e = 0.0;
                        std::int64_t n_states = 0;
                        for (std::size_t i = 0; i < net.nodes.size(); ++i)
                            for (std::size_t s = 0; s < post[i].size(); ++s) {
                                double d = std::abs(approx_post[i][s] - post[i][s]);
                                max_e = std::max(max_e, d);
                                sum_e += d;
                                ++n_states;
                            }
                        rec.oracle_max_err = max_e;
                        rec.oracle_mean_err = sum_e / static_cast<double>(n_states);
                    } catch (const ExcludedCaseError&) {
                        // the oracle rules the case out entirely; leave the columns empty
                    }
                }
            }
            if (reps > 0) second_sum += detail::timed_propagation(run.tree, c, reps);
            block.cases.push_back(std::move(rec));
        }
        if (reps > 0 && !cases.empty()) {
            double mean_seconds = second_sum / static_cast<double>(cases.size());
            block.prop_seconds = mean_seconds;
            if (epsilon == 0.0) baseline_seconds = mean_seconds;
            if (baseline_seconds > 0.0) block.time_ratio = mean_seconds / baseline_seconds;
        }
        result.blocks.push_back(std::move(block));
    }
    return result;
}

// Fixed, versioned CSV schema; one row per (epsilon, case), or a single row
// per epsilon when the case set is empty.  Optional columns stay empty.
inline std::string bench_csv(const BenchResult& r) {
    std::string out = "# cpnet-bench-v1\n";
    out += "network,heuristic,epsilon,e,payload_bytes,dense_bytes,prop_seconds,time_ratio,"
           "case,mu_case,coarse_bound,refined_bound,max_err,mean_err,"
           "oracle_max_err,oracle_mean_err\n";
    for (const auto& b : r.blocks) {
        std::string prefix = r.network + ',' + r.heuristic + ',' + format_double(b.epsilon) +
                             ',' + format_double(b.global_error) + ',' +
                             std::to_string(b.payload_bytes) + ',' +
                             std::to_string(b.dense_bytes) + ',' +
                             detail::csv_field(b.prop_seconds) + ',' +
                             detail::csv_field(b.time_ratio) + ',';
        if (b.cases.empty()) {
            out += prefix + ",,,,,,,\n";
            continue;
        }
        for (const auto& c : b.cases) {
            out += prefix + std::to_string(c.case_index) + ',' + format_double(c.mu_case) +
                   ',' + format_double(c.coarse) + ',' + format_double(c.refined) + ',' +
                   detail::csv_field(c.max_err) + ',' + detail::csv_field(c.mean_err) + ',' +
                   detail::csv_field(c.oracle_max_err) + ',' +
                   detail::csv_field(c.oracle_mean_err) + '\n';
        }
    }
    return out;
}

} // namespace cpnet
