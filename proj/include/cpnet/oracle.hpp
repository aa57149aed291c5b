#pragma once

// Brute-force ground truth by full joint enumeration.  Deliberately
// independent of the belief-table operations: probabilities come straight
// from CPT entries, indexed by hand.  Shares only the linearization
// convention (row-major, last node fastest), so tables are comparable
// index by index.

#include <cstdint>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/junction_tree.hpp"
#include "cpnet/network.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

struct JointTable {
    std::vector<std::int64_t> shape; // state count per node, declared order
    std::vector<double> p;           // joint probabilities, last node fastest
};

namespace oracle_detail {

constexpr std::int64_t kMaxJoint = std::int64_t{1} << 24;

// allowed-state masks per node; duplicate findings intersect
inline std::vector<std::vector<char>> finding_masks(const NetworkSpec& net,
                                                    const std::vector<Finding>& findings) {
    std::vector<std::vector<char>> mask(net.nodes.size());
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        mask[i].assign(net.nodes[i].states.size(), 1);
    for (const auto& f : findings) {
        if (f.node < 0 || f.node >= static_cast<int>(net.nodes.size()))
            throw InvalidArgument("finding names an unknown node");
        std::vector<char> this_mask(net.nodes[static_cast<std::size_t>(f.node)].states.size(), 0);
        for (int s : f.states) {
            if (s < 0 || s >= static_cast<int>(this_mask.size()))
                throw InvalidArgument("finding state index out of range");
            this_mask[static_cast<std::size_t>(s)] = 1;
        }
        for (std::size_t s = 0; s < this_mask.size(); ++s)
            mask[static_cast<std::size_t>(f.node)][s] =
                static_cast<char>(mask[static_cast<std::size_t>(f.node)][s] & this_mask[s]);
    }
    return mask;
}

// walk all joint assignments in linearization order, handing the digit
// vector to the callback
template <typename Fn>
inline void for_each_assignment(const std::vector<std::int64_t>& shape, Fn&& fn) {
    const std::size_t n = shape.size();
    std::int64_t total = 1;
    for (std::int64_t s : shape) total *= s;
    std::vector<std::int64_t> digit(n, 0);
    for (std::int64_t lin = 0; lin < total; ++lin) {
        fn(lin, digit);
        for (std::size_t a = n; a-- > 0;) {
            if (++digit[a] < shape[a]) break;
            digit[a] = 0;
        }
    }
}

} // namespace oracle_detail

inline JointTable enumerate_joint(const NetworkSpec& net) {
    JointTable jt;
    std::int64_t total = 1;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        std::int64_t s = net.state_count(static_cast<int>(i));
        if (total > oracle_detail::kMaxJoint / s)
            throw InvalidArgument("joint state space exceeds the enumeration guard");
        total *= s;
        jt.shape.push_back(s);
    }
    // per-node parent index lists for direct CPT addressing
    std::vector<std::vector<int>> parents(net.nodes.size());
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        for (const auto& pid : net.nodes[i].parents)
            parents[i].push_back(net.node_index(pid));
    jt.p.assign(static_cast<std::size_t>(total), 0.0);
    oracle_detail::for_each_assignment(jt.shape, [&](std::int64_t lin,
                                                     const std::vector<std::int64_t>& digit) {
        double prod = 1.0;
        for (std::size_t i = 0; i < net.nodes.size(); ++i) {
            std::int64_t row = 0;
            for (int p : parents[i]) row = row * net.state_count(p) + digit[static_cast<std::size_t>(p)];
            std::int64_t idx = row * net.state_count(static_cast<int>(i)) + digit[i];
            prod *= net.nodes[i].cpt[static_cast<std::size_t>(idx)];
        }
        jt.p[static_cast<std::size_t>(lin)] = prod;
    });
    return jt;
}

inline double oracle_evidence_prob(const NetworkSpec& net, const JointTable& joint,
                                   const std::vector<Finding>& findings) {
    auto mask = oracle_detail::finding_masks(net, findings);
    double total = 0.0;
    oracle_detail::for_each_assignment(joint.shape, [&](std::int64_t lin,
                                                        const std::vector<std::int64_t>& digit) {
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (!mask[i][static_cast<std::size_t>(digit[i])]) return;
        total += joint.p[static_cast<std::size_t>(lin)];
    });
    return total;
}

// posterior marginals of every node given the findings, in one scan
inline std::vector<std::vector<double>> oracle_all_posteriors(const NetworkSpec& net,
                                                              const JointTable& joint,
                                                              const std::vector<Finding>& findings) {
    auto mask = oracle_detail::finding_masks(net, findings);
    std::vector<std::vector<double>> acc(net.nodes.size());
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        acc[i].assign(net.nodes[i].states.size(), 0.0);
    double total = 0.0;
    oracle_detail::for_each_assignment(joint.shape, [&](std::int64_t lin,
                                                        const std::vector<std::int64_t>& digit) {
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (!mask[i][static_cast<std::size_t>(digit[i])]) return;
        double p = joint.p[static_cast<std::size_t>(lin)];
        total += p;
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i][static_cast<std::size_t>(digit[i])] += p;
    });
    if (total == 0.0) throw ExcludedCaseError("oracle: case has zero probability");
    for (auto& v : acc)
        for (double& x : v) x /= total;
    return acc;
}

inline std::vector<double> oracle_posterior(const NetworkSpec& net, const JointTable& joint,
                                            const std::vector<Finding>& findings, int node) {
    return oracle_all_posteriors(net, joint, findings)[static_cast<std::size_t>(node)];
}

// Joint mass that survives an approximated tree's zeroed entries: an
// assignment survives when every clique table is positive at its projection
// (optionally restricted to assignments compatible with the findings).
inline double oracle_surviving_mass(const JointTable& joint, const NetworkSpec& net,
                                    const JunctionTree& tree,
                                    const std::vector<Finding>& findings = {}) {
    auto mask = oracle_detail::finding_masks(net, findings);
    // strides of each clique's table inside the joint index space
    std::vector<std::vector<std::int64_t>> strides;
    for (const auto& c : tree.cliques) {
        std::vector<std::int64_t> st(joint.shape.size(), 0);
        std::int64_t s = 1;
        for (std::size_t p = c.nodes.size(); p-- > 0;) {
            st[static_cast<std::size_t>(c.nodes[p])] = s;
            s *= tree.state_count(c.nodes[p]);
        }
        strides.push_back(std::move(st));
    }
    double total = 0.0;
    oracle_detail::for_each_assignment(joint.shape, [&](std::int64_t lin,
                                                        const std::vector<std::int64_t>& digit) {
        double p = joint.p[static_cast<std::size_t>(lin)];
        if (p == 0.0) return;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (!mask[i][static_cast<std::size_t>(digit[i])]) return;
        for (std::size_t c = 0; c < tree.cliques.size(); ++c) {
            std::int64_t idx = 0;
            for (std::size_t a = 0; a < joint.shape.size(); ++a)
                idx += digit[a] * strides[c][a];
            if (tree.cliques[c].table.at(idx) == 0.0) return;
        }
        total += p;
    });
    return total;
}

} // namespace cpnet
