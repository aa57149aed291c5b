#pragma once

// Shared fixtures: the two- and three-node chain networks used by the worked
// examples, a state-count-only network for raw-graph triangulation tests,
// and a seeded corpus of small random networks with oracle-admissible cases.

#include <cmath>
#include <string>
#include <vector>

#include "cpnet/engine.hpp"
#include "cpnet/network.hpp"
#include "cpnet/oracle.hpp"
#include "cpnet/synthetic.hpp"

namespace test_helpers {

inline bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline const char* kChain2Json =
    R"({"name":"chain","nodes":[{"id":"A","states":["t","f"],"parents":[],"cpt":[0.3,0.7]},)"
    R"({"id":"B","states":["t","f"],"parents":["A"],"cpt":[0.9,0.1,0.2,0.8]}]})";

inline cpnet::NetworkSpec chain2() { return cpnet::parse_network(kChain2Json); }

inline cpnet::NetworkSpec chain3() {
    cpnet::NetworkSpec net;
    net.name = "chain3";
    net.nodes.push_back({"A", {"t", "f"}, {}, {0.3, 0.7}});
    net.nodes.push_back({"B", {"t", "f"}, {"A"}, {0.9, 0.1, 0.2, 0.8}});
    net.nodes.push_back({"C", {"t", "f"}, {"B"}, {0.5, 0.5, 0.1, 0.9}});
    return net;
}

// parentless network carrying only state counts (drives weighted triangulation)
inline cpnet::NetworkSpec states_net(const std::vector<int>& counts) {
    cpnet::NetworkSpec net;
    net.name = "states";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        cpnet::NodeSpec n;
        n.id = std::string(1, static_cast<char>('A' + i));
        for (int s = 0; s < counts[i]; ++s) n.states.push_back("s" + std::to_string(s));
        n.cpt.assign(static_cast<std::size_t>(counts[i]), 1.0 / counts[i]);
        net.nodes.push_back(std::move(n));
    }
    return net;
}

struct CorpusEntry {
    cpnet::NetworkSpec net;
    cpnet::JointTable joint;
    std::vector<cpnet::Case> cases; // oracle evidence probability > 0 each
};

inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = [] {
        std::vector<CorpusEntry> out;
        for (int i = 0; i < 200; ++i) {
            cpnet::SyntheticConfig cfg;
            cfg.nodes = 2 + (i % 9); // 2..10 nodes
            cfg.max_parents = 3;
            cfg.min_states = 2;
            cfg.max_states = 4;
            cfg.alpha = 0.3 + 0.2 * (i % 7);
            cfg.zero_fraction = (i % 3 == 0) ? 0.0 : (i % 3 == 1 ? 0.2 : 0.45);
            cfg.seed = 1000 + static_cast<std::uint64_t>(i);
            CorpusEntry e;
            e.net = cpnet::generate_synthetic(cfg);
            e.joint = cpnet::enumerate_joint(e.net);
            cpnet::detail::SyntheticRng rng(777000 + static_cast<std::uint64_t>(i));
            const int n = cfg.nodes;
            int attempts = 0;
            while (e.cases.size() < 5) {
                if (++attempts > 10000) { // pathological support; fall back to no evidence
                    e.cases.push_back({});
                    continue;
                }
                cpnet::Case c;
                int k = 1 + static_cast<int>(rng.below(std::min(3, n)));
                std::vector<int> picks = rng.choose(k, n);
                std::sort(picks.begin(), picks.end());
                for (int node : picks) {
                    int states =
                        static_cast<int>(e.net.nodes[static_cast<std::size_t>(node)].states.size());
                    c.findings.push_back({node, {static_cast<int>(rng.below(states))}});
                }
                if (cpnet::oracle_evidence_prob(e.net, e.joint, c.findings) > 0.0)
                    e.cases.push_back(std::move(c));
            }
            out.push_back(std::move(e));
        }
        return out;
    }();
    return entries;
}

} // namespace test_helpers
