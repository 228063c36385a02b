#include "cafe/cafe_gcn.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "cafe/error.hpp"
#include "cafe/linalg.hpp"

namespace cafe {

PrunedColumns prune_zero_columns(const Matrix& h, double threshold) {
    PrunedColumns out;
    for (Eigen::Index c = 0; c < h.cols(); ++c)
        if (h.col(c).maxCoeff() >= threshold) out.kept.push_back(static_cast<std::size_t>(c));
    out.h.resize(h.rows(), static_cast<Eigen::Index>(out.kept.size()));
    for (std::size_t i = 0; i < out.kept.size(); ++i)
        out.h.col(static_cast<Eigen::Index>(i)) = h.col(static_cast<Eigen::Index>(out.kept[i]));
    return out;
}

EmbeddingMatrix qr_embed(const CovarianceOperator& q, const Matrix& h) {
    if (static_cast<std::size_t>(h.rows()) != q.size()) throw InputError("dimension mismatch in qr_embed");
    const Matrix qh = q.product(h, false);
    auto qr = linalg::thin_qr(qh);
    EmbeddingMatrix e;
    e.h_hat = std::move(qr.q);
    e.source_columns = std::move(qr.kept);
    if (!qr.dropped.empty()) {
        std::string cols;
        for (std::size_t c : qr.dropped) cols += (cols.empty() ? "" : ",") + std::to_string(c);
        e.warnings.push_back("QH rank deficient: dropped column(s) " + cols + ", C reduced to " +
                             std::to_string(e.source_columns.size()));
    }
    return e;
}

CafeResult cafe_gcn(const CovarianceOperator& q, const CafeOptions& options, std::span<const PinnedLabel> pinned) {
    options.cluster.validate();
    const std::size_t n = q.size();
    CafeResult result;
    Matrix h;
    if (options.labels == LabelMode::full) {
        if (pinned.size() != n) throw InputError("full-label mode needs a label for every node");
        std::vector<std::size_t> partition(n, 0);
        std::vector<char> seen(n, 0);
        for (const auto& p : pinned) {
            if (p.node >= n) throw InputError("label for node out of range");
            if (seen[p.node]) throw InputError("node labeled twice");
            seen[p.node] = 1;
            partition[p.node] = p.cluster;
        }
        h = indicator_matrix(partition, options.cluster.k);
        result.objective = off_diagonal_objective(q, h);
        result.sweeps = 0;
    } else {
        if (options.labels == LabelMode::none && !pinned.empty())
            throw InputError("pinned labels given without semi-supervised mode");
        auto run = run_softmax(q, options.cluster, pinned);
        h = std::move(run.assignment.h);
        result.objective = run.objective;
        result.sweeps = run.sweeps;
        result.converged = run.converged;
        result.trace = std::move(run.trace);
    }

    if (options.prune) {
        auto pruned = prune_zero_columns(h);
        result.h = std::move(pruned.h);
    } else {
        result.h = std::move(h);
    }
    result.clusters = static_cast<std::size_t>(result.h.cols());
    result.embedding = qr_embed(q, result.h);
    return result;
}

Coarsening coarsen(const ModularityMatrix& q, std::span<const std::size_t> partition) {
    const SampledGraph& g = q.graph();
    const std::size_t n = g.size();
    if (partition.size() != n) throw InputError("partition must cover all nodes");

    // Compact cluster ids in ascending order, dropping empty clusters.
    std::vector<std::size_t> ids(partition.begin(), partition.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Coarsening out;
    out.membership.resize(n);
    for (std::size_t u = 0; u < n; ++u)
        out.membership[u] =
            static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), partition[u]) - ids.begin());
    const std::size_t k = ids.size();

    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    entries.reserve(g.nonzeros());
    for (std::size_t u = 0; u < n; ++u) {
        const auto nb = g.neighbors(u);
        const auto pr = g.probabilities(u);
        for (std::size_t i = 0; i < nb.size(); ++i)
            entries.emplace_back(out.membership[u], out.membership[nb[i]], pr[i]);
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<std::size_t> row_ptr(k + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> probs;
    std::size_t last_row = k;
    for (const auto& [i, j, p] : entries) {
        if (i == last_row && cols.back() == j) {
            probs.back() += p;
            continue;
        }
        cols.push_back(j);
        probs.push_back(p);
        ++row_ptr[i + 1];
        last_row = i;
    }
    for (std::size_t i = 0; i < k; ++i) row_ptr[i + 1] += row_ptr[i];

    // Summation order differs between (i,j) and (j,i); mirror the upper
    // triangle so the pooled distribution is exactly symmetric.
    auto find = [&](std::size_t i, std::size_t j) -> double* {
        auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
        auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
        auto it = std::lower_bound(first, last, j);
        return (it != last && *it == j) ? &probs[static_cast<std::size_t>(it - cols.begin())] : nullptr;
    };
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx)
            if (cols[idx] > i) {
                double* mirror = find(cols[idx], i);
                if (mirror) *mirror = probs[idx];
            }

    out.pooled = std::make_shared<const SampledGraph>(
        SampledGraph::from_distribution(k, std::move(row_ptr), std::move(cols), std::move(probs), NodeIndex::identity(k)));
    out.q_pooled = ModularityMatrix(out.pooled).dense(false);
    return out;
}

std::vector<LayerResult> multilayer(const ModularityMatrix& q, const MultilayerOptions& options) {
    const std::size_t n = q.size();
    std::vector<LayerResult> layers;
    ModularityMatrix current = q.with_diag_zeroed(false);
    std::vector<std::size_t> membership(n);
    for (std::size_t u = 0; u < n; ++u) membership[u] = u;
    double incumbent = 0.0;

    for (std::size_t level = 0; level < options.max_levels; ++level) {
        const std::size_t size = current.size();
        if (size < 2) break;
        ClusterConfig config = options.cluster;
        config.k = level == 0 && options.cluster.k != 0 ? std::min(options.cluster.k, size) : size;
        if (config.k < 2) break;
        config.theta = options.hard_theta;
        config.seed = options.cluster.seed + level;

        const auto run = run_softmax(current, config);
        const auto labels = hardmax(run.assignment.h);
        Coarsening coarse = coarsen(current, labels);
        const Matrix hard = indicator_matrix(coarse.membership);
        const double modularity = coarse.q_pooled.trace();
        if (!(modularity > incumbent + 1e-12)) break;

        LayerResult layer;
        layer.level = level;
        layer.clusters = static_cast<std::size_t>(hard.cols());
        layer.h = hard;
        layer.embedding = qr_embed(current, hard);
        layer.q_pooled = coarse.q_pooled;
        layer.modularity = modularity;
        for (std::size_t u = 0; u < n; ++u) membership[u] = coarse.membership[membership[u]];
        layer.membership = membership;
        layers.push_back(std::move(layer));

        incumbent = modularity;
        if (coarse.pooled->size() == size) break;  // nothing merged; pooling is the identity
        current = ModularityMatrix(coarse.pooled);
    }
    return layers;
}

}  // namespace cafe
