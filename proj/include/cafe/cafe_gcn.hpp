#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cafe/matrix.hpp"
#include "cafe/sampled_graph.hpp"
#include "cafe/softmax_cluster.hpp"

namespace cafe {

/// Column-orthonormal n x C embedding: the approximate dominant eigenvectors.
struct EmbeddingMatrix {
    Matrix h_hat;
    std::vector<std::size_t> source_columns;  ///< input columns that survived the QR step
    std::vector<std::string> warnings;

    std::size_t dimension() const { return static_cast<std::size_t>(h_hat.cols()); }
};

inline constexpr double kZeroColumnThreshold = 1e-8;

struct PrunedColumns {
    Matrix h;
    std::vector<std::size_t> kept;

    std::size_t clusters() const { return kept.size(); }
};

/// Drops columns whose largest entry is below threshold; order is kept.
PrunedColumns prune_zero_columns(const Matrix& h, double threshold = kZeroColumnThreshold);

/// Thin QR of Q H on the true diagonal. Linearly dependent columns of Q H
/// are dropped (C shrinks) and noted in warnings.
EmbeddingMatrix qr_embed(const CovarianceOperator& q, const Matrix& h);

enum class LabelMode {
    none,     ///< plain clustering
    partial,  ///< the pinned nodes are fixed, the rest is clustered
    full      ///< every node labeled: skip clustering, QR of the indicator
};

struct CafeOptions {
    ClusterConfig cluster;
    LabelMode labels = LabelMode::none;
    bool prune = true;  ///< Algorithm step removing empty clusters; off for dimensionality reduction
};

struct CafeResult {
    std::size_t clusters = 0;  ///< C, nonzero columns of H
    Matrix h;                  ///< n x C soft assignment
    EmbeddingMatrix embedding;
    double objective = 0.0;    ///< tr(H^T Q_0 H) at the end of clustering
    std::size_t sweeps = 0;
    bool converged = true;
    std::vector<double> trace;
};

/// Softmax clustering, pruning and the QR step.
CafeResult cafe_gcn(const CovarianceOperator& q, const CafeOptions& options, std::span<const PinnedLabel> pinned = {});

struct Coarsening {
    std::shared_ptr<const SampledGraph> pooled;  ///< supernode distribution
    std::vector<std::size_t> membership;         ///< node -> supernode, empty clusters compacted away
    Matrix q_pooled;                             ///< dense H^T Q H on the supernodes
};

/// Pools p over a hard partition: p~(i,j) = sum_{u in S_i, w in S_j} p(u,w).
Coarsening coarsen(const ModularityMatrix& q, std::span<const std::size_t> partition);

struct LayerResult {
    std::size_t level = 0;
    std::size_t clusters = 0;                  ///< C at this level
    Matrix h;                                  ///< hard assignment of this level's nodes
    EmbeddingMatrix embedding;                 ///< embedding of this level's nodes
    Matrix q_pooled;                           ///< pooled Q over this level's clusters
    double modularity = 0.0;                   ///< tr(H^T Q H) of the level partition
    std::vector<std::size_t> membership;       ///< original node -> cluster at this level
};

struct MultilayerOptions {
    ClusterConfig cluster{.k = 0};  ///< k caps the level-0 cluster count; 0 means n
    double hard_theta = 1e6;      ///< stands in for an infinite inverse temperature
    std::size_t max_levels = 64;
};

/// Repeated hardmax CAFE and pooling while the modularity strictly increases.
std::vector<LayerResult> multilayer(const ModularityMatrix& q, const MultilayerOptions& options);

}  // namespace cafe
