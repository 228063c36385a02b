#pragma once

// Fixtures and brute-force oracles shared by the unit tests. The oracles
// rebuild everything densely from the raw edge list so they do not share
// code paths with the library.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cafe/generators.hpp"
#include "cafe/io.hpp"
#include "cafe/matrix.hpp"
#include "cafe/sampled_graph.hpp"

namespace testing {

using cafe::Edge;
using cafe::Matrix;
using cafe::Vector;

inline std::shared_ptr<const cafe::SampledGraph> graph_of(std::size_t n, const std::vector<Edge>& edges) {
    return std::make_shared<const cafe::SampledGraph>(cafe::SampledGraph::from_edges(n, edges));
}

inline cafe::ModularityMatrix modularity_of(std::size_t n, const std::vector<Edge>& edges, bool zeroed = false) {
    return cafe::ModularityMatrix(graph_of(n, edges), zeroed);
}

/// Dense P straight from the edge list.
inline Matrix dense_p(std::size_t n, const std::vector<Edge>& edges) {
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& e : edges) {
        const auto u = static_cast<Eigen::Index>(e.u);
        const auto v = static_cast<Eigen::Index>(e.w);
        if (u == v) {
            w(u, u) += e.weight;
        } else {
            w(u, v) += e.weight;
            w(v, u) += e.weight;
        }
    }
    return w / w.sum();
}

/// Dense Q = P - p p^T.
inline Matrix dense_q(std::size_t n, const std::vector<Edge>& edges) {
    const Matrix p = dense_p(n, edges);
    const Vector m = p.rowwise().sum();
    return p - m * m.transpose();
}

/// ER graph with at least one edge.
inline std::vector<Edge> random_edges(std::size_t n, double p, std::uint64_t seed) {
    for (std::uint64_t s = seed;; s += 1000003) {
        auto e = cafe::gen::erdos_renyi(n, p, s);
        if (!e.empty()) return e;
    }
}

/// Random positive weights on top of an ER graph.
inline std::vector<Edge> random_weighted_edges(std::size_t n, double p, std::uint64_t seed) {
    auto edges = random_edges(n, p, seed);
    std::mt19937_64 rng(seed ^ 0xabcdefULL);
    std::uniform_real_distribution<double> w(0.1, 3.0);
    for (auto& e : edges) e.weight = w(rng);
    return edges;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

inline Matrix random_stochastic(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

/// Eigen's solver, values descending; independent of the in-house solvers.
struct OracleSpectrum {
    Vector values;
    Matrix vectors;
};

inline OracleSpectrum oracle_eigen(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(a)};
    const auto n = a.rows();
    OracleSpectrum out{Vector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = es.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

/// Modularity of a partition by the O(n^2) double sum.
inline double brute_modularity(const Matrix& q, const std::vector<std::size_t>& partition) {
    double s = 0.0;
    for (std::size_t u = 0; u < partition.size(); ++u)
        for (std::size_t w = 0; w < partition.size(); ++w)
            if (partition[u] == partition[w]) s += q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(w));
    return s;
}

/// Best 2-partition by enumerating all 2^(n-1) splits.
inline std::vector<std::size_t> best_bipartition(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    double best = -1e300;
    std::vector<std::size_t> arg(n, 0);
    std::vector<std::size_t> part(n);
    for (std::uint64_t mask = 0; mask < (1ULL << (n - 1)); ++mask) {
        for (std::size_t u = 0; u < n; ++u) part[u] = (mask >> u) & 1ULL;
        const double m = brute_modularity(q, part);
        if (m > best + 1e-15) {
            best = m;
            arg = part;
        }
    }
    return arg;
}

/// Fraction of nodes on which two 2-labelings agree, up to swapping labels.
inline double agreement(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
    const double f = static_cast<double>(same) / static_cast<double>(a.size());
    return std::max(f, 1.0 - f);
}

inline std::string data_path(const std::string& name) { return std::string(CAFE_DATA_DIR) + "/" + name; }

inline std::vector<cafe::LabeledEdge> karate_edges() { return cafe::io::read_edge_list(data_path("karate.tsv")); }

inline cafe::ModularityMatrix karate() {
    const auto edges = karate_edges();
    return cafe::ModularityMatrix(std::make_shared<const cafe::SampledGraph>(cafe::SampledGraph::from_edges(edges)));
}

inline double max_orthonormality_error(const Matrix& h) {
    return (h.transpose() * h - Matrix::Identity(h.cols(), h.cols())).cwiseAbs().maxCoeff();
}

}  // namespace testing
