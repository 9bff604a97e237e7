#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "canid/expr.hpp"
#include "canid/graph.hpp"
#include "canid/parallel.hpp"
#include "canid/rng.hpp"

namespace canid {

enum class DistKind { Gaussian, Uniform, Laplace };

struct NoiseSpec {
    std::string id;
    DistKind kind = DistKind::Gaussian;
    double p1 = 0.0;  // mean / lo / loc
    double p2 = 1.0;  // sd / hi / scale

    void validate() const {
        switch (kind) {
            case DistKind::Gaussian:
                if (!(p2 > 0)) throw std::invalid_argument("noise '" + id + "': sd must be > 0");
                break;
            case DistKind::Uniform:
                if (!(p2 > p1)) throw std::invalid_argument("noise '" + id + "': hi must be > lo");
                break;
            case DistKind::Laplace:
                if (!(p2 > 0)) throw std::invalid_argument("noise '" + id + "': scale must be > 0");
                break;
        }
    }

    double draw(Rng& rng) const {
        switch (kind) {
            case DistKind::Gaussian: return rng.normal(p1, p2);
            case DistKind::Uniform: return rng.uniform(p1, p2);
            case DistKind::Laplace: return rng.laplace(p1, p2);
        }
        return 0.0;
    }

    double mean() const {
        switch (kind) {
            case DistKind::Gaussian: return p1;
            case DistKind::Uniform: return 0.5 * (p1 + p2);
            case DistKind::Laplace: return p1;
        }
        return 0.0;
    }

    double variance() const {
        switch (kind) {
            case DistKind::Gaussian: return p2 * p2;
            case DistKind::Uniform: return (p2 - p1) * (p2 - p1) / 12.0;
            case DistKind::Laplace: return 2.0 * p2 * p2;
        }
        return 0.0;
    }
};

struct ColumnInfo {
    std::string name;
    bool observed = true;
};

// Column-labeled sample matrix. Hidden columns are carried along; callers
// that model the observer's view select observed columns only.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<ColumnInfo> columns, size_t rows, uint64_t seed)
        : columns_(std::move(columns)), rows_(rows), seed_(seed), data_(rows * columns_.size(), 0.0) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return columns_.size(); }
    uint64_t seed() const { return seed_; }
    const std::vector<ColumnInfo>& columns() const { return columns_; }

    double& at(size_t r, size_t c) { return data_[r * columns_.size() + c]; }
    double at(size_t r, size_t c) const { return data_[r * columns_.size() + c]; }

    size_t column_index(const std::string& name) const {
        for (size_t c = 0; c < columns_.size(); ++c)
            if (columns_[c].name == name) return c;
        std::string known;
        for (const auto& col : columns_) known += (known.empty() ? "" : ", ") + col.name;
        throw std::invalid_argument("dataset: unknown column '" + name + "' (have: " + known + ")");
    }

    bool has_column(const std::string& name) const {
        for (const auto& col : columns_)
            if (col.name == name) return true;
        return false;
    }

    std::vector<double> column(size_t c) const {
        std::vector<double> out(rows_);
        for (size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
        return out;
    }

    std::vector<double> column(const std::string& name) const { return column(column_index(name)); }

    Dataset observed_view() const {
        std::vector<ColumnInfo> cols;
        std::vector<size_t> keep;
        for (size_t c = 0; c < columns_.size(); ++c)
            if (columns_[c].observed) {
                cols.push_back(columns_[c]);
                keep.push_back(c);
            }
        Dataset out(cols, rows_, seed_);
        for (size_t r = 0; r < rows_; ++r)
            for (size_t k = 0; k < keep.size(); ++k) out.at(r, k) = at(r, keep[k]);
        return out;
    }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

private:
    std::vector<ColumnInfo> columns_;
    size_t rows_ = 0;
    uint64_t seed_ = 0;
    std::vector<double> data_;
};

// Structural model: one functional equation per node, expression trees over
// parents and one private noise term. Immutable after construction.
class ScmModel {
public:
    ScmModel(CausalGraph graph, std::vector<ExprPtr> equations, std::vector<NoiseSpec> noises)
        : graph_(std::move(graph)), equations_(std::move(equations)), noises_(std::move(noises)) {
        validate();
    }

    const CausalGraph& graph() const { return graph_; }
    const std::vector<NoiseSpec>& noises() const { return noises_; }
    const ExprPtr& equation(NodeId v) const { return equations_.at(static_cast<size_t>(v.index)); }
    const std::vector<ExprPtr>& equations() const { return equations_; }

    int noise_of(NodeId v) const { return node_noise_.at(static_cast<size_t>(v.index)); }

    // Builds the edge set implied by the equations' variable references.
    static CausalGraph derive_graph(const std::vector<NodeDecl>& nodes, const std::vector<ExprPtr>& equations) {
        std::vector<std::pair<int, int>> edges;
        for (size_t v = 0; v < equations.size(); ++v) {
            std::set<int> refs;
            collect_vars(*equations[v], refs);
            for (int p : refs) edges.emplace_back(p, static_cast<int>(v));
        }
        return CausalGraph::from_index_edges(nodes, edges);
    }

private:
    void validate() {
        const int n = graph_.node_count();
        if (static_cast<int>(equations_.size()) != n)
            throw std::invalid_argument("model: one equation required per node");
        for (const auto& ns : noises_) ns.validate();
        for (size_t i = 0; i < noises_.size(); ++i)
            for (size_t j = 0; j < i; ++j)
                if (noises_[i].id == noises_[j].id)
                    throw std::invalid_argument("model: duplicate noise id '" + noises_[i].id + "'");

        node_noise_.assign(n, -1);
        std::vector<int> noise_owner(noises_.size(), -1);
        for (int v = 0; v < n; ++v) {
            std::set<int> refs;
            collect_vars(*equations_[v], refs);
            const auto& pars = graph_.parents(NodeId{v});
            for (int p : refs) {
                const bool is_parent =
                    std::find(pars.begin(), pars.end(), NodeId{p}) != pars.end();
                if (!is_parent)
                    throw std::invalid_argument("model: equation of '" + graph_.name(NodeId{v}) +
                                                "' references non-parent '" + graph_.name(NodeId{p}) + "'");
            }
            std::set<int> used;
            collect_noises(*equations_[v], used);
            if (used.size() != 1)
                throw std::invalid_argument("model: equation of '" + graph_.name(NodeId{v}) +
                                            "' must reach exactly one noise term");
            const int ni = *used.begin();
            if (ni < 0 || ni >= static_cast<int>(noises_.size()))
                throw std::invalid_argument("model: equation of '" + graph_.name(NodeId{v}) +
                                            "' references undeclared noise");
            if (noise_owner[ni] >= 0)
                throw std::invalid_argument("model: noise '" + noises_[ni].id + "' shared by '" +
                                            graph_.name(NodeId{noise_owner[ni]}) + "' and '" +
                                            graph_.name(NodeId{v}) + "'");
            noise_owner[ni] = v;
            node_noise_[v] = ni;
        }
    }

    CausalGraph graph_;
    std::vector<ExprPtr> equations_;
    std::vector<NoiseSpec> noises_;
    std::vector<int> node_noise_;
};

// Forward simulation. Rows use counter-based substreams of (seed, row), so
// the result is identical however the row range is split across threads.
inline Dataset sample(const ScmModel& model, size_t n, uint64_t seed, int threads = 0) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    const auto& g = model.graph();
    const auto order = g.topological_order();
    std::vector<ColumnInfo> cols;
    for (int i = 0; i < g.node_count(); ++i) cols.push_back({g.name(NodeId{i}), g.observed(NodeId{i})});
    Dataset ds(cols, n, seed);

    const size_t n_nodes = static_cast<size_t>(g.node_count());
    const size_t n_noises = model.noises().size();
    std::string failure;
    std::mutex failure_mutex;

    parallel_for(
        n,
        [&](size_t row) {
            Rng rng = substream(seed, row);
            std::vector<double> noise_vals(n_noises);
            for (size_t k = 0; k < n_noises; ++k) noise_vals[k] = model.noises()[k].draw(rng);
            std::vector<double> node_vals(n_nodes, 0.0);
            for (NodeId v : order) {
                const double val = eval(*model.equation(v), node_vals, noise_vals);
                if (!std::isfinite(val)) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (failure.empty())
                        failure = "sample: non-finite value at node '" + g.name(v) + "' (row " +
                                  std::to_string(row) + ")";
                    return;
                }
                node_vals[static_cast<size_t>(v.index)] = val;
            }
            for (size_t c = 0; c < n_nodes; ++c) ds.at(row, c) = node_vals[c];
        },
        threads);

    if (!failure.empty()) throw std::runtime_error(failure);
    return ds;
}

}  // namespace canid
