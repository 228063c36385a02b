#include "cafe/sampled_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "cafe/error.hpp"

namespace cafe {

NodeIndex::NodeIndex(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], i).second) throw InputError("duplicate node label '" + labels_[i] + "'");
    }
}

NodeIndex NodeIndex::identity(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return NodeIndex(std::move(labels));
}

std::size_t NodeIndex::intern(const std::string& label) {
    auto [it, inserted] = index_.emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
}

std::size_t NodeIndex::at(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw InputError("unknown node '" + label + "'");
    return it->second;
}

namespace {

struct PairWeight {
    std::size_t lo;
    std::size_t hi;
    double weight;
};

// Builds symmetric CSR from unordered pair weights, normalized by total.
SampledGraph build_symmetric(std::size_t n, std::vector<PairWeight> pairs, NodeIndex nodes) {
    std::sort(pairs.begin(), pairs.end(),
              [](const PairWeight& a, const PairWeight& b) { return std::tie(a.lo, a.hi) < std::tie(b.lo, b.hi); });
    std::vector<PairWeight> merged;
    for (const auto& p : pairs) {
        if (!merged.empty() && merged.back().lo == p.lo && merged.back().hi == p.hi)
            merged.back().weight += p.weight;
        else
            merged.push_back(p);
    }

    // Off-diagonal pairs appear twice in the ordered distribution.
    double total = 0.0;
    for (const auto& p : merged) total += (p.lo == p.hi) ? p.weight : 2.0 * p.weight;
    if (!(total > 0.0)) throw InputError("empty graph");

    std::vector<std::size_t> degree(n, 0);
    for (const auto& p : merged) {
        if (p.weight == 0.0) continue;
        ++degree[p.lo];
        if (p.lo != p.hi) ++degree[p.hi];
    }
    std::vector<std::size_t> row_ptr(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) row_ptr[u + 1] = row_ptr[u] + degree[u];

    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    entries.reserve(row_ptr[n]);
    for (const auto& p : merged) {
        if (p.weight == 0.0) continue;
        const double prob = p.weight / total;
        entries.emplace_back(p.lo, p.hi, prob);
        if (p.lo != p.hi) entries.emplace_back(p.hi, p.lo, prob);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<std::size_t> cols(entries.size());
    std::vector<double> probs(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        cols[i] = std::get<1>(entries[i]);
        probs[i] = std::get<2>(entries[i]);
    }
    return SampledGraph::from_distribution(n, std::move(row_ptr), std::move(cols), std::move(probs),
                                           std::move(nodes));
}

void check_weight(double w) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("invalid weight");
}

}  // namespace

SampledGraph SampledGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
    if (edges.empty()) throw InputError("empty graph");
    std::vector<PairWeight> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) {
        check_weight(e.weight);
        if (e.u >= n || e.w >= n) throw InputError("edge endpoint out of range");
        pairs.push_back({std::min(e.u, e.w), std::max(e.u, e.w), e.weight});
    }
    return build_symmetric(n, std::move(pairs), NodeIndex::identity(n));
}

SampledGraph SampledGraph::from_edges(std::span<const LabeledEdge> edges) {
    if (edges.empty()) throw InputError("empty graph");
    NodeIndex nodes;
    std::vector<PairWeight> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) {
        check_weight(e.weight);
        const std::size_t u = nodes.intern(e.u);
        const std::size_t w = nodes.intern(e.w);
        pairs.push_back({std::min(u, w), std::max(u, w), e.weight});
    }
    const std::size_t n = nodes.size();
    return build_symmetric(n, std::move(pairs), std::move(nodes));
}

SampledGraph SampledGraph::from_similarity(const Matrix& sim) {
    if (sim.rows() != sim.cols() || sim.rows() == 0) throw InputError("similarity matrix must be square and non-empty");
    if (!sim.allFinite()) throw InputError("similarity matrix must be finite");
    const std::size_t n = static_cast<std::size_t>(sim.rows());
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (sim(i, j) + sim(j, i));
    const double min_sim = s.minCoeff();

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += s(i, j) - min_sim;
    if (!(total > 0.0)) throw InputError("degenerate similarity");

    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> probs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // (s(i,j) - min) is computed identically for (j,i), so the stored
            // distribution is exactly symmetric.
            const double v = (s(i, j) - min_sim) / total;
            if (v > 0.0) {
                cols.push_back(j);
                probs.push_back(v);
            }
        }
        row_ptr[i + 1] = cols.size();
    }
    return from_distribution(n, std::move(row_ptr), std::move(cols), std::move(probs), NodeIndex::identity(n));
}

SampledGraph SampledGraph::from_distribution(std::size_t n, std::vector<std::size_t> row_ptr,
                                             std::vector<std::size_t> cols, std::vector<double> probs,
                                             NodeIndex nodes) {
    if (row_ptr.size() != n + 1 || cols.size() != probs.size() || row_ptr.back() != cols.size())
        throw InputError("malformed sparse distribution");
    if (nodes.size() != n) throw InputError("node index size does not match n");
    SampledGraph g;
    g.row_ptr_ = std::move(row_ptr);
    g.cols_ = std::move(cols);
    g.probs_ = std::move(probs);
    g.nodes_ = std::move(nodes);
    g.marginal_.assign(n, 0.0);
    g.finalize();
    return g;
}

void SampledGraph::finalize() {
    const std::size_t n = marginal_.size();
    for (std::size_t u = 0; u < n; ++u) {
        double m = 0.0;
        for (std::size_t i = row_ptr_[u]; i < row_ptr_[u + 1]; ++i) {
            if (probs_[i] < 0.0 || !std::isfinite(probs_[i])) throw InputError("invalid probability");
            if (cols_[i] >= n) throw InputError("column index out of range");
            if (i > row_ptr_[u] && cols_[i] <= cols_[i - 1]) throw InputError("columns must ascend within a row");
            m += probs_[i];
        }
        marginal_[u] = m;
    }
}

std::span<const std::size_t> SampledGraph::neighbors(std::size_t u) const {
    return {cols_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
}

std::span<const double> SampledGraph::probabilities(std::size_t u) const {
    return {probs_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
}

double SampledGraph::probability(std::size_t u, std::size_t w) const {
    const auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), w);
    if (it == nb.end() || *it != w) return 0.0;
    return probabilities(u)[static_cast<std::size_t>(it - nb.begin())];
}

double SampledGraph::total_mass() const {
    // Neumaier summation: a plain sum over millions of tiny entries drifts by ~1e-11.
    double t = 0.0;
    double c = 0.0;
    for (double p : probs_) {
        const double next = t + p;
        c += std::abs(t) >= std::abs(p) ? (t - next) + p : (p - next) + t;
        t = next;
    }
    return t + c;
}

Matrix SampledGraph::dense_distribution() const {
    const std::size_t n = size();
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t u = 0; u < n; ++u) {
        const auto nb = neighbors(u);
        const auto pr = probabilities(u);
        for (std::size_t i = 0; i < nb.size(); ++i) p(u, nb[i]) = pr[i];
    }
    return p;
}

ModularityMatrix::ModularityMatrix(std::shared_ptr<const SampledGraph> graph, bool diag_zeroed)
    : CovarianceOperator(diag_zeroed), graph_(std::move(graph)) {
    if (!graph_) throw InputError("null graph");
}

double ModularityMatrix::raw_covariance(std::size_t u, std::size_t w) const {
    return graph_->probability(u, w) - graph_->marginal(u) * graph_->marginal(w);
}

Matrix ModularityMatrix::product(const Matrix& h, bool zero_diagonal) const {
    check_rows(h);
    const std::size_t n = size();
    const Eigen::Index k = h.cols();
    const Matrix s = aggregate(h);
    Matrix out = Matrix::Zero(n, k);
    for (std::size_t u = 0; u < n; ++u) {
        const auto nb = graph_->neighbors(u);
        const auto pr = graph_->probabilities(u);
        auto row = out.row(static_cast<Eigen::Index>(u));
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (zero_diagonal && nb[i] == u) continue;
            row += pr[i] * h.row(static_cast<Eigen::Index>(nb[i]));
        }
        const double pu = graph_->marginal(u);
        row -= pu * s.row(0);
        if (zero_diagonal) row += (pu * pu) * h.row(static_cast<Eigen::Index>(u));
    }
    return out;
}

Matrix ModularityMatrix::aggregate(const Matrix& h) const {
    check_rows(h);
    Matrix s = Matrix::Zero(1, h.cols());
    for (std::size_t w = 0; w < size(); ++w) s.row(0) += graph_->marginal(w) * h.row(static_cast<Eigen::Index>(w));
    return s;
}

std::size_t ModularityMatrix::off_diagonal_product(std::size_t u, const Matrix& h, const Matrix& agg,
                                                   std::span<double> z) const {
    const std::size_t k = z.size();
    const auto nb = graph_->neighbors(u);
    const auto pr = graph_->probabilities(u);
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (nb[i] == u) continue;
        const double p = pr[i];
        const double* hw = h.data() + nb[i] * k;
        for (std::size_t c = 0; c < k; ++c) z[c] += p * hw[c];
    }
    const double pu = graph_->marginal(u);
    const double* hu = h.data() + u * k;
    const double* s = agg.data();
    for (std::size_t c = 0; c < k; ++c) z[c] -= pu * (s[c] - pu * hu[c]);
    return (nb.size() + 1) * k;
}

void ModularityMatrix::update_aggregate(Matrix& agg, std::size_t u, std::span<const double> delta) const {
    const double pu = graph_->marginal(u);
    for (std::size_t c = 0; c < delta.size(); ++c) agg(0, static_cast<Eigen::Index>(c)) += pu * delta[c];
}

double ModularityMatrix::spectral_radius_bound() const {
    const auto& m = graph_->marginals();
    return 2.0 * *std::max_element(m.begin(), m.end());
}

double partition_modularity(const ModularityMatrix& q, std::span<const std::size_t> partition) {
    const SampledGraph& g = q.graph();
    const std::size_t n = g.size();
    if (partition.size() != n) throw InputError("partition must cover all nodes");
    const std::size_t clusters = n == 0 ? 0 : *std::max_element(partition.begin(), partition.end()) + 1;

    double inside = 0.0;
    std::vector<double> volume(clusters, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const auto nb = g.neighbors(u);
        const auto pr = g.probabilities(u);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (q.diag_zeroed() && nb[i] == u) continue;
            if (partition[nb[i]] == partition[u]) inside += pr[i];
        }
        volume[partition[u]] += g.marginal(u);
    }
    double expected = 0.0;
    for (double v : volume) expected += v * v;
    if (q.diag_zeroed()) {
        for (std::size_t u = 0; u < n; ++u) expected -= g.marginal(u) * g.marginal(u);
    }
    return inside - expected;
}

Matrix indicator_matrix(std::span<const std::size_t> partition, std::size_t clusters) {
    std::size_t k = clusters;
    for (std::size_t c : partition) k = std::max(k, c + 1);
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(partition.size()), static_cast<Eigen::Index>(k));
    for (std::size_t u = 0; u < partition.size(); ++u)
        h(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(partition[u])) = 1.0;
    return h;
}

}  // namespace cafe
