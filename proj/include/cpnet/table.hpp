#pragma once

// Belief tables over sets of discrete nodes.
//
// A table's scope is an ordered list of node indices; values are linearized
// row-major with the LAST scope position varying fastest.  The same
// convention is used for CPT rows in network files, so a CPT is just a
// belief table over (parents..., node).
//
// Two storage representations: a flat dense array, or a sorted
// (linear index, value) pair list holding only nonzero entries.  Every
// operation iterates entries in ascending linear index, so results are
// identical bit for bit whichever representation the operands use.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "cpnet/errors.hpp"

namespace cpnet {

// a finding restricts one node to a set of allowed states
struct Finding {
    int node = -1;
    std::vector<int> states; // allowed state indices, sorted, distinct, non-empty
};

class BeliefTable {
public:
    using Entry = std::pair<std::int64_t, double>;

    BeliefTable() = default;

    static BeliefTable dense(std::vector<int> scope, std::vector<std::int64_t> shape,
                             std::vector<double> values) {
        BeliefTable t;
        t.init_shape(std::move(scope), std::move(shape));
        if (static_cast<std::int64_t>(values.size()) != t.size_)
            throw InvalidArgument("dense value count does not match state-space size");
        for (double& v : values) check_value(v);
        t.dense_ = std::move(values);
        return t;
    }

    static BeliefTable sparse(std::vector<int> scope, std::vector<std::int64_t> shape,
                              std::vector<Entry> entries) {
        BeliefTable t;
        t.init_shape(std::move(scope), std::move(shape));
        std::int64_t prev = -1;
        for (auto& [idx, v] : entries) {
            if (idx <= prev || idx >= t.size_)
                throw InvalidArgument("sparse entries must be sorted, distinct, in range");
            prev = idx;
            check_value(v);
            if (v == 0.0) throw InvalidArgument("sparse entries must be nonzero");
        }
        t.is_sparse_ = true;
        t.entries_ = std::move(entries);
        return t;
    }

    static BeliefTable ones(std::vector<int> scope, std::vector<std::int64_t> shape) {
        BeliefTable t;
        t.init_shape(std::move(scope), std::move(shape));
        t.dense_.assign(static_cast<std::size_t>(t.size_), 1.0);
        return t;
    }

    // scalar table over the empty scope (used for zero separators)
    static BeliefTable unit() { return ones({}, {}); }

    const std::vector<int>& scope() const { return scope_; }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::int64_t size() const { return size_; }
    bool is_sparse() const { return is_sparse_; }

    const std::vector<double>& dense_values() const {
        if (is_sparse_) throw InvalidArgument("table is sparse");
        return dense_;
    }
    const std::vector<Entry>& sparse_entries() const {
        if (!is_sparse_) throw InvalidArgument("table is dense");
        return entries_;
    }

    std::int64_t nonzero_count() const {
        if (is_sparse_) return static_cast<std::int64_t>(entries_.size());
        std::int64_t c = 0;
        for (double v : dense_) c += (v != 0.0);
        return c;
    }

    double at(std::int64_t linear) const {
        if (linear < 0 || linear >= size_) throw InvalidArgument("linear index out of range");
        if (!is_sparse_) return dense_[static_cast<std::size_t>(linear)];
        auto it = std::lower_bound(entries_.begin(), entries_.end(), linear,
                                   [](const Entry& e, std::int64_t i) { return e.first < i; });
        return (it != entries_.end() && it->first == linear) ? it->second : 0.0;
    }

    int scope_position(int node) const {
        for (std::size_t i = 0; i < scope_.size(); ++i)
            if (scope_[i] == node) return static_cast<int>(i);
        return -1;
    }

    // number of values a serializer writes for this representation
    std::int64_t stored_value_count() const {
        return is_sparse_ ? 2 * static_cast<std::int64_t>(entries_.size()) : size_;
    }

private:
    static void check_value(double& v) {
        if (!(v >= 0.0) || v > 1.7976931348623157e308)
            throw InvalidArgument("table values must be finite and nonnegative");
        if (v == 0.0) v = 0.0; // normalize -0.0
    }

    void init_shape(std::vector<int> scope, std::vector<std::int64_t> shape) {
        if (scope.size() != shape.size())
            throw InvalidArgument("scope and shape length mismatch");
        std::vector<int> sorted = scope;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidArgument("scope nodes must be distinct");
        size_ = 1;
        for (std::int64_t s : shape) {
            if (s < 1) throw InvalidArgument("state counts must be >= 1");
            if (size_ > (std::int64_t{1} << 40) / s)
                throw InvalidArgument("table state space too large");
            size_ *= s;
        }
        scope_ = std::move(scope);
        shape_ = std::move(shape);
    }

    std::vector<int> scope_;
    std::vector<std::int64_t> shape_;
    std::int64_t size_ = 1;
    bool is_sparse_ = false;
    std::vector<double> dense_;  // when dense
    std::vector<Entry> entries_; // when sparse, sorted by index

    friend class TableIter;
};

namespace detail {

// Strides of a sub-scope table inside an enclosing table's index space.
// substride[a] is what one step along enclosing axis a contributes to the
// sub-table's linear index (0 if that node is outside the sub-scope).
inline std::vector<std::int64_t> subscope_strides(const std::vector<int>& scope,
                                                  const std::vector<int>& sub_scope,
                                                  const std::vector<std::int64_t>& sub_shape) {
    std::vector<std::int64_t> sub_stride(sub_scope.size(), 1);
    for (std::size_t p = sub_scope.size(); p-- > 1;)
        sub_stride[p - 1] = sub_stride[p] * sub_shape[p];
    std::vector<std::int64_t> out(scope.size(), 0);
    for (std::size_t p = 0; p < sub_scope.size(); ++p) {
        bool found = false;
        for (std::size_t a = 0; a < scope.size(); ++a) {
            if (scope[a] == sub_scope[p]) {
                out[a] = sub_stride[p];
                found = true;
                break;
            }
        }
        if (!found) throw InvalidArgument("sub-scope node missing from enclosing scope");
    }
    return out;
}

// walk every (enclosing linear index, sub linear index) pair in ascending order
template <typename Fn>
inline void for_each_aligned(const std::vector<std::int64_t>& shape,
                             const std::vector<std::int64_t>& sub_stride, Fn&& fn) {
    const std::size_t k = shape.size();
    std::int64_t total = 1;
    for (std::int64_t s : shape) total *= s;
    std::vector<std::int64_t> digit(k, 0);
    std::int64_t sub = 0;
    for (std::int64_t lin = 0; lin < total; ++lin) {
        fn(lin, sub);
        for (std::size_t a = k; a-- > 0;) {
            if (++digit[a] < shape[a]) {
                sub += sub_stride[a];
                break;
            }
            digit[a] = 0;
            sub -= sub_stride[a] * (shape[a] - 1);
        }
    }
}

// sub linear index for one enclosing linear index (used on sparse walks)
inline std::int64_t aligned_index(std::int64_t lin, const std::vector<std::int64_t>& shape,
                                  const std::vector<std::int64_t>& sub_stride) {
    std::int64_t sub = 0;
    for (std::size_t a = shape.size(); a-- > 0;) {
        sub += (lin % shape[a]) * sub_stride[a];
        lin /= shape[a];
    }
    return sub;
}

} // namespace detail

inline double table_sum(const BeliefTable& t) {
    double s = 0.0;
    if (t.is_sparse()) {
        for (const auto& [idx, v] : t.sparse_entries()) s += v;
    } else {
        for (double v : t.dense_values()) s += v;
    }
    return s;
}

// Sum out every node not in `keep`.  Result scope preserves t's scope order
// and is always dense.
inline BeliefTable marginalize(const BeliefTable& t, const std::vector<int>& keep) {
    std::vector<int> out_scope;
    std::vector<std::int64_t> out_shape;
    for (std::size_t a = 0; a < t.scope().size(); ++a) {
        if (std::find(keep.begin(), keep.end(), t.scope()[a]) != keep.end()) {
            out_scope.push_back(t.scope()[a]);
            out_shape.push_back(t.shape()[a]);
        }
    }
    if (out_scope.size() != keep.size())
        throw InvalidArgument("marginalize: keep set must be a subset of the table scope");
    auto stride = detail::subscope_strides(t.scope(), out_scope, out_shape);
    std::int64_t out_size = 1;
    for (std::int64_t s : out_shape) out_size *= s;
    std::vector<double> out(static_cast<std::size_t>(out_size), 0.0);
    if (t.is_sparse()) {
        for (const auto& [idx, v] : t.sparse_entries())
            out[static_cast<std::size_t>(detail::aligned_index(idx, t.shape(), stride))] += v;
    } else {
        const auto& vals = t.dense_values();
        detail::for_each_aligned(t.shape(), stride, [&](std::int64_t lin, std::int64_t sub) {
            out[static_cast<std::size_t>(sub)] += vals[static_cast<std::size_t>(lin)];
        });
    }
    return BeliefTable::dense(std::move(out_scope), std::move(out_shape), std::move(out));
}

namespace detail {

inline std::vector<double> densified(const BeliefTable& t) {
    if (!t.is_sparse()) return t.dense_values();
    std::vector<double> out(static_cast<std::size_t>(t.size()), 0.0);
    for (const auto& [idx, v] : t.sparse_entries()) out[static_cast<std::size_t>(idx)] = v;
    return out;
}

// apply fn(value, aligned sub index) -> value to every entry of t
template <typename Fn>
inline BeliefTable map_aligned(const BeliefTable& t, const std::vector<std::int64_t>& sub_stride,
                               Fn&& fn) {
    if (t.is_sparse()) {
        std::vector<BeliefTable::Entry> out;
        out.reserve(t.sparse_entries().size());
        for (const auto& [idx, v] : t.sparse_entries()) {
            double r = fn(v, detail::aligned_index(idx, t.shape(), sub_stride));
            if (r != 0.0) out.emplace_back(idx, r);
        }
        return BeliefTable::sparse(t.scope(), t.shape(), std::move(out));
    }
    const auto& vals = t.dense_values();
    std::vector<double> out(vals.size(), 0.0);
    detail::for_each_aligned(t.shape(), sub_stride, [&](std::int64_t lin, std::int64_t sub) {
        out[static_cast<std::size_t>(lin)] = fn(vals[static_cast<std::size_t>(lin)], sub);
    });
    return BeliefTable::dense(t.scope(), t.shape(), std::move(out));
}

} // namespace detail

// Pointwise product; u's scope must be a subset of t's (any order), u is
// broadcast over the rest.  Result keeps t's scope and representation.
inline BeliefTable multiply(const BeliefTable& t, const BeliefTable& u) {
    auto stride = detail::subscope_strides(t.scope(), u.scope(), u.shape());
    std::vector<double> uv = detail::densified(u);
    return detail::map_aligned(t, stride,
                               [&](double v, std::int64_t sub) { return v * uv[static_cast<std::size_t>(sub)]; });
}

// Pointwise quotient over identical scopes with 0/0 := 0.  A nonzero
// numerator over a zero denominator means the propagation state is
// corrupted, and raises InconsistencyError.
inline BeliefTable divide(const BeliefTable& num, const BeliefTable& den) {
    if (num.scope() != den.scope() || num.shape() != den.shape())
        throw InvalidArgument("divide: operand scopes must be identical");
    std::vector<double> dv = detail::densified(den);
    std::vector<std::int64_t> stride(num.scope().size(), 1);
    for (std::size_t p = num.scope().size(); p-- > 1;)
        stride[p - 1] = stride[p] * num.shape()[p];
    return detail::map_aligned(num, stride, [&](double n, std::int64_t sub) {
        if (n == 0.0) return 0.0;
        double d = dv[static_cast<std::size_t>(sub)];
        if (d == 0.0) throw InconsistencyError("divide: nonzero numerator over zero denominator");
        return n / d;
    });
}

// Zero every entry whose state for the finding's node is not allowed.
inline BeliefTable enter_finding(const BeliefTable& t, const Finding& f) {
    int pos = t.scope_position(f.node);
    if (pos < 0) throw InvalidArgument("enter_finding: node not in table scope");
    std::int64_t n_states = t.shape()[static_cast<std::size_t>(pos)];
    if (f.states.empty()) throw InvalidArgument("enter_finding: empty state set");
    std::vector<char> allowed(static_cast<std::size_t>(n_states), 0);
    for (int s : f.states) {
        if (s < 0 || s >= n_states) throw InvalidArgument("enter_finding: state index out of range");
        allowed[static_cast<std::size_t>(s)] = 1;
    }
    // aligned index == the digit of the finding's node
    std::vector<std::int64_t> stride(t.scope().size(), 0);
    stride[static_cast<std::size_t>(pos)] = 1;
    return detail::map_aligned(
        t, stride, [&](double v, std::int64_t digit) { return allowed[static_cast<std::size_t>(digit)] ? v : 0.0; });
}

// Pick the cheaper representation: sparse when at most half the entries are
// nonzero, dense otherwise.
inline BeliefTable compress(const BeliefTable& t) {
    std::int64_t nnz = t.nonzero_count();
    bool want_sparse = 2 * nnz <= t.size();
    if (want_sparse == t.is_sparse()) return t;
    if (want_sparse) {
        std::vector<BeliefTable::Entry> entries;
        entries.reserve(static_cast<std::size_t>(nnz));
        const auto& vals = t.dense_values();
        for (std::int64_t i = 0; i < t.size(); ++i)
            if (vals[static_cast<std::size_t>(i)] != 0.0)
                entries.emplace_back(i, vals[static_cast<std::size_t>(i)]);
        return BeliefTable::sparse(t.scope(), t.shape(), std::move(entries));
    }
    return BeliefTable::dense(t.scope(), t.shape(), detail::densified(t));
}

inline BeliefTable decompress(const BeliefTable& t) {
    if (!t.is_sparse()) return t;
    return BeliefTable::dense(t.scope(), t.shape(), detail::densified(t));
}

struct AnnihilationResult {
    BeliefTable table;
    double removed_mass = 0.0;
};

// Zero all entries strictly below delta; removed mass is accumulated in
// ascending index order.
inline AnnihilationResult annihilate_below(const BeliefTable& t, double delta) {
    AnnihilationResult r;
    if (t.is_sparse()) {
        std::vector<BeliefTable::Entry> kept;
        kept.reserve(t.sparse_entries().size());
        for (const auto& [idx, v] : t.sparse_entries()) {
            if (v < delta)
                r.removed_mass += v;
            else
                kept.emplace_back(idx, v);
        }
        r.table = BeliefTable::sparse(t.scope(), t.shape(), std::move(kept));
    } else {
        std::vector<double> vals = t.dense_values();
        for (double& v : vals) {
            if (v < delta) {
                r.removed_mass += v;
                v = 0.0;
            }
        }
        r.table = BeliefTable::dense(t.scope(), t.shape(), std::move(vals));
    }
    return r;
}

// Zero all entries <= cutoff (the sort-exact selector's annihilation set;
// equal values always go together).  cutoff < 0 removes nothing.
inline AnnihilationResult annihilate_leq(const BeliefTable& t, double cutoff) {
    AnnihilationResult r;
    if (t.is_sparse()) {
        std::vector<BeliefTable::Entry> kept;
        kept.reserve(t.sparse_entries().size());
        for (const auto& [idx, v] : t.sparse_entries()) {
            if (v <= cutoff)
                r.removed_mass += v;
            else
                kept.emplace_back(idx, v);
        }
        r.table = BeliefTable::sparse(t.scope(), t.shape(), std::move(kept));
    } else {
        std::vector<double> vals = t.dense_values();
        for (double& v : vals) {
            if (v <= cutoff) {
                r.removed_mass += v;
                v = 0.0;
            }
        }
        r.table = BeliefTable::dense(t.scope(), t.shape(), std::move(vals));
    }
    return r;
}

inline BeliefTable scale(const BeliefTable& t, double factor) {
    if (!(factor >= 0.0)) throw InvalidArgument("scale factor must be nonnegative");
    std::vector<std::int64_t> stride(t.scope().size(), 0);
    return detail::map_aligned(t, stride, [&](double v, std::int64_t) { return v * factor; });
}

// value-level equality across representations (used by tests and checks)
inline bool value_equal(const BeliefTable& a, const BeliefTable& b) {
    if (a.scope() != b.scope() || a.shape() != b.shape()) return false;
    for (std::int64_t i = 0; i < a.size(); ++i)
        if (a.at(i) != b.at(i)) return false;
    return true;
}

} // namespace cpnet
