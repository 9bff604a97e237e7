#pragma once

// Test-only reference implementations, kept independent of the library's
// algorithms: d-separation by simple-path enumeration, HSIC by direct
// double-centering, and exhaustive permutation p-values.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "canid/graph.hpp"

namespace canid_test {

// Enumerates all simple undirected paths between a and b and applies the
// blocking rules edge by edge: noncolliders block when conditioned,
// colliders block unless they or a descendant is conditioned.
class PathEnumerationOracle {
public:
    explicit PathEnumerationOracle(const canid::CausalGraph& g) : g_(g), n_(g.node_count()) {
        desc_in_.assign(static_cast<size_t>(n_), {});
        for (int v = 0; v < n_; ++v) {
            auto rel = g_.relatives(canid::NodeId{v});
            desc_in_[static_cast<size_t>(v)].assign(static_cast<size_t>(n_), false);
            desc_in_[static_cast<size_t>(v)][static_cast<size_t>(v)] = true;
            for (auto d : rel.descendants) desc_in_[static_cast<size_t>(v)][static_cast<size_t>(d.index)] = true;
        }
    }

    bool d_separated(canid::NodeId a, canid::NodeId b, const canid::NodeSet& s) const {
        std::vector<bool> cond(static_cast<size_t>(n_), false);
        for (auto v : s) cond[static_cast<size_t>(v.index)] = true;
        std::vector<int> path{a.index};
        std::vector<bool> used(static_cast<size_t>(n_), false);
        used[static_cast<size_t>(a.index)] = true;
        return !active_path_exists(path, used, b.index, cond);
    }

private:
    bool edge(int u, int v) const { return g_.has_edge(canid::NodeId{u}, canid::NodeId{v}); }

    bool path_active(const std::vector<int>& path, const std::vector<bool>& cond) const {
        for (size_t k = 1; k + 1 < path.size(); ++k) {
            const int prev = path[k - 1], mid = path[k], next = path[k + 1];
            const bool collider = edge(prev, mid) && edge(next, mid);
            if (collider) {
                bool opened = false;
                for (int v = 0; v < n_; ++v)
                    if (cond[static_cast<size_t>(v)] && desc_in_[static_cast<size_t>(mid)][static_cast<size_t>(v)])
                        opened = true;
                if (!opened) return false;
            } else {
                if (cond[static_cast<size_t>(mid)]) return false;
            }
        }
        return true;
    }

    bool active_path_exists(std::vector<int>& path, std::vector<bool>& used, int target,
                            const std::vector<bool>& cond) const {
        const int tail = path.back();
        if (tail == target) return path.size() >= 2 && path_active(path, cond);
        for (int v = 0; v < n_; ++v) {
            if (used[static_cast<size_t>(v)]) continue;
            if (!edge(tail, v) && !edge(v, tail)) continue;
            used[static_cast<size_t>(v)] = true;
            path.push_back(v);
            if (active_path_exists(path, used, target, cond)) {
                path.pop_back();
                used[static_cast<size_t>(v)] = false;
                return true;
            }
            path.pop_back();
            used[static_cast<size_t>(v)] = false;
        }
        return false;
    }

    const canid::CausalGraph& g_;
    int n_;
    std::vector<std::vector<bool>> desc_in_;
};

inline double median_of(std::vector<double> v) {
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    return v[mid];
}

// Direct biased HSIC: build both Gram matrices, double-center the first,
// and take the normalized Frobenius inner product.
inline double hsic_direct(const std::vector<double>& a, const std::vector<double>& b, double ha, double hb) {
    const size_t m = a.size();
    std::vector<double> K(m * m), L(m * m);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            K[i * m + j] = std::exp(-da * da / (2 * ha * ha));
            L[i * m + j] = std::exp(-db * db / (2 * hb * hb));
        }
    std::vector<double> rowK(m, 0.0);
    double grand = 0;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) rowK[i] += K[i * m + j];
        grand += rowK[i];
        rowK[i] /= static_cast<double>(m);
    }
    grand /= static_cast<double>(m * m);
    double acc = 0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) acc += (K[i * m + j] - rowK[i] - rowK[j] + grand) * L[i * m + j];
    return acc / static_cast<double>(m * m);
}

inline double median_bandwidth(const std::vector<double>& v) {
    std::vector<double> d;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j) d.push_back(std::abs(v[i] - v[j]));
    return median_of(std::move(d));
}

// Exhaustive permutation p-value: all |b|! pairings, identity included.
inline double hsic_exhaustive_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
    const double ha = median_bandwidth(a);
    const double hb = median_bandwidth(b);
    const double observed = hsic_direct(a, b, ha, hb);
    std::vector<size_t> order(b.size());
    std::iota(order.begin(), order.end(), size_t{0});
    uint64_t total = 0, hits = 0;
    do {
        std::vector<double> bp(b.size());
        for (size_t i = 0; i < b.size(); ++i) bp[i] = b[order[i]];
        if (hsic_direct(a, bp, ha, hb) >= observed) ++hits;
        ++total;
    } while (std::next_permutation(order.begin(), order.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace canid_test
