#pragma once

// Seeded random-network generation for benchmarks and property tests.
//
// The generator owns every sampling step on top of a fixed-width mt19937_64
// stream (uniforms, Box-Muller normals, Marsaglia-Tsang gamma variates for
// Dirichlet rows), so a given seed yields the same network on every run of
// the same build.  Conditional-probability rows are Dirichlet(alpha) with a
// dithered share of states forced to exact zero, which controls table
// sparsity without breaking row normalization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpnet/errors.hpp"
#include "cpnet/network.hpp"

namespace cpnet {

struct SyntheticConfig {
    int nodes = 8;
    int max_parents = 3;
    int min_states = 2;
    int max_states = 4;
    double alpha = 0.5;        // Dirichlet concentration per surviving state
    double zero_fraction = 0.0; // share of each row forced to exact zero
    std::uint64_t seed = 1;
};

namespace detail {

class SyntheticRng {
public:
    explicit SyntheticRng(std::uint64_t seed) : rng_(seed) {}

    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double uniform01_pos() {
        for (;;) {
            double u = uniform01();
            if (u > 0.0) return u;
        }
    }

    std::int64_t below(std::int64_t m) {
        return static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(m));
    }

    double normal() {
        double u1 = uniform01_pos();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double gamma(double alpha) {
        if (alpha < 1.0)
            return gamma(alpha + 1.0) * std::pow(uniform01_pos(), 1.0 / alpha);
        double d = alpha - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform01_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // first k of a Fisher-Yates shuffle over {0, ..., m-1}
    std::vector<int> choose(int k, int m) {
        std::vector<int> pool(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            std::int64_t j = i + below(m - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        return pool;
    }

private:
    std::mt19937_64 rng_;
};

} // namespace detail

inline NetworkSpec generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.nodes < 1) throw InvalidArgument("generator: need at least one node");
    if (cfg.min_states < 2 || cfg.max_states < cfg.min_states)
        throw InvalidArgument("generator: state range must satisfy 2 <= min <= max");
    if (cfg.max_parents < 0) throw InvalidArgument("generator: max parents must be >= 0");
    if (!(cfg.alpha > 0.0)) throw InvalidArgument("generator: alpha must be positive");
    if (!(cfg.zero_fraction >= 0.0 && cfg.zero_fraction < 1.0))
        throw InvalidArgument("generator: zero fraction must lie in [0, 1)");

    detail::SyntheticRng rng(cfg.seed);
    NetworkSpec net;
    net.name = "synthetic-" + std::to_string(cfg.nodes) + "n-" + std::to_string(cfg.seed);
    std::vector<int> state_count(static_cast<std::size_t>(cfg.nodes));

    for (int i = 0; i < cfg.nodes; ++i) {
        NodeSpec node;
        node.id = "n" + std::to_string(i);
        int states = cfg.min_states +
                     static_cast<int>(rng.below(cfg.max_states - cfg.min_states + 1));
        state_count[static_cast<std::size_t>(i)] = states;
        for (int s = 0; s < states; ++s) node.states.push_back("s" + std::to_string(s));

        int cap = std::min(i, cfg.max_parents);
        int parent_count = cap == 0 ? 0 : static_cast<int>(rng.below(cap + 1));
        std::vector<int> parents = rng.choose(parent_count, i);
        std::sort(parents.begin(), parents.end());
        std::int64_t rows = 1;
        for (int p : parents) {
            node.parents.push_back("n" + std::to_string(p));
            rows *= state_count[static_cast<std::size_t>(p)];
        }

        node.cpt.reserve(static_cast<std::size_t>(rows * states));
        for (std::int64_t r = 0; r < rows; ++r) {
            // dithered zero count, never the whole row
            int zeros = static_cast<int>(
                std::floor(cfg.zero_fraction * states + rng.uniform01()));
            zeros = std::min(zeros, states - 1);
            std::vector<int> zero_at = rng.choose(zeros, states);
            std::vector<char> is_zero(static_cast<std::size_t>(states), 0);
            for (int z : zero_at) is_zero[static_cast<std::size_t>(z)] = 1;
            std::vector<double> row(static_cast<std::size_t>(states), 0.0);
            double sum = 0.0;
            for (int s = 0; s < states; ++s) {
                if (is_zero[static_cast<std::size_t>(s)]) continue;
                double g = rng.gamma(cfg.alpha);
                row[static_cast<std::size_t>(s)] = g;
                sum += g;
            }
            if (sum == 0.0) {
                // all gamma draws underflowed; fall back to a flat row
                int kept = states - zeros;
                for (int s = 0; s < states; ++s)
                    if (!is_zero[static_cast<std::size_t>(s)])
                        row[static_cast<std::size_t>(s)] = 1.0 / kept;
            } else {
                for (double& v : row) v /= sum;
            }
            node.cpt.insert(node.cpt.end(), row.begin(), row.end());
        }
        net.nodes.push_back(std::move(node));
    }
    return net;
}

} // namespace cpnet
