#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cafe/covariance_operator.hpp"
#include "cafe/matrix.hpp"

namespace cafe {

struct Edge {
    std::size_t u = 0;
    std::size_t w = 0;
    double weight = 1.0;
};

struct LabeledEdge {
    std::string u;
    std::string w;
    double weight = 1.0;
};

/// External node label <-> dense index.
class NodeIndex {
public:
    NodeIndex() = default;
    explicit NodeIndex(std::vector<std::string> labels);

    /// Labels "0", "1", ..., "n-1".
    static NodeIndex identity(std::size_t n);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Index of label, adding it if absent.
    std::size_t intern(const std::string& label);
    bool contains(const std::string& label) const { return index_.count(label) != 0; }
    std::size_t at(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

/**
 * n nodes with a symmetric bivariate distribution p(u,w).
 *
 * Stored as compressed sparse rows over dense indices with both (u,w) and
 * (w,u) present and bit-identical. Column indices within a row ascend, so
 * every sweep sums in a fixed order.
 */
class SampledGraph {
public:
    /// Uniform weighted-edge sampling: p(u,w) = (w(u,w) + w(w,u)) / (2 sum w).
    /// Multi-edges are summed; a self-loop (u,u) contributes weight/sum to p(u,u).
    static SampledGraph from_edges(std::size_t n, std::span<const Edge> edges);
    static SampledGraph from_edges(std::span<const LabeledEdge> edges);

    /// p(u,w) = (sim(u,w) - min sim) / sum_{i,j} (sim(i,j) - min sim) after
    /// symmetrizing sim.
    static SampledGraph from_similarity(const Matrix& sim);

    /// Takes ownership of symmetric CSR triples that already sum to one.
    static SampledGraph from_distribution(std::size_t n, std::vector<std::size_t> row_ptr,
                                          std::vector<std::size_t> cols, std::vector<double> probs,
                                          NodeIndex nodes);

    std::size_t size() const { return marginal_.size(); }
    /// Stored entries, counting (u,w) and (w,u) separately.
    std::size_t nonzeros() const { return cols_.size(); }

    std::span<const std::size_t> neighbors(std::size_t u) const;
    std::span<const double> probabilities(std::size_t u) const;
    double probability(std::size_t u, std::size_t w) const;

    /// p_U(u) = sum_w p(u,w); by symmetry equal to p_W.
    double marginal(std::size_t u) const { return marginal_[u]; }
    const std::vector<double>& marginals() const { return marginal_; }

    double total_mass() const;

    const NodeIndex& nodes() const { return nodes_; }

    /// Dense P, for tests and small oracles.
    Matrix dense_distribution() const;

private:
    SampledGraph() = default;
    void finalize();

    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> probs_;
    std::vector<double> marginal_;
    NodeIndex nodes_;
};

/**
 * Q = P - p_U p_W^T, the covariance between node pairs.
 *
 * diag_zeroed records whether q(u,u) reads as 0; the clustering sweeps
 * always skip the diagonal regardless, while the QR step and spectral
 * checks want the true Q.
 */
class ModularityMatrix final : public CovarianceOperator {
public:
    explicit ModularityMatrix(std::shared_ptr<const SampledGraph> graph, bool diag_zeroed = false);

    ModularityMatrix with_diag_zeroed(bool zeroed) const { return ModularityMatrix(graph_, zeroed); }

    const SampledGraph& graph() const { return *graph_; }
    std::shared_ptr<const SampledGraph> graph_ptr() const { return graph_; }

    std::size_t size() const override { return graph_->size(); }
    double raw_covariance(std::size_t u, std::size_t w) const override;
    Matrix product(const Matrix& h, bool zero_diagonal) const override;
    Matrix aggregate(const Matrix& h) const override;
    std::size_t off_diagonal_product(std::size_t u, const Matrix& h, const Matrix& agg,
                                     std::span<double> z) const override;
    void update_aggregate(Matrix& agg, std::size_t u, std::span<const double> delta) const override;
    double spectral_radius_bound() const override;

private:
    std::shared_ptr<const SampledGraph> graph_;
};

/// sum_k q(S_k, S_k) in O(n + m); partition[u] is the cluster of u.
double partition_modularity(const ModularityMatrix& q, std::span<const std::size_t> partition);

/// Indicator matrix of a partition with max(partition)+1 columns.
Matrix indicator_matrix(std::span<const std::size_t> partition, std::size_t clusters = 0);

}  // namespace cafe
