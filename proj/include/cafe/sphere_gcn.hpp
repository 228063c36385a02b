#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cafe/cafe_gcn.hpp"
#include "cafe/covariance_operator.hpp"
#include "cafe/matrix.hpp"

namespace cafe {

/// n x K matrix whose rows lie on the unit sphere.
struct SphereAssignment {
    Matrix h;
    double beta = 0.5;
};

struct SphereConfig {
    std::size_t k = 2;
    double beta = 0.5;  ///< influence parameter in [0, 1]
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 200;
    double tol = 1e-9;

    void validate() const;
};

/// Rows are seeded standard Gaussians normalized to unit length.
SphereAssignment init_sphere(std::size_t n, std::size_t k, std::uint64_t seed);

/// h <- normalize((1 - beta) h + beta z). Returns false, leaving h as is,
/// when the combination has (numerically) zero length.
bool sphere_update(std::span<double> row, std::span<const double> z, double beta);

struct SphereResult {
    SphereAssignment assignment;
    double objective = 0.0;  ///< tr(H^T Q H) on the true diagonal
    std::size_t sweeps = 0;
    bool converged = false;
    std::size_t degenerate_updates = 0;
    std::size_t operations = 0;  ///< multiply-adds in the last sweep
    std::vector<double> trace;
};

/// Called after each single-row update with the node, its z_u and the row before the update.
using SphereObserver = std::function<void(std::size_t u, std::span<const double> z, std::span<const double> before,
                                          std::span<const double> after)>;

/// One ascending pass. Returns the true-diagonal objective after the pass.
double sphere_sweep(const CovarianceOperator& q, SphereAssignment& a, SphereResult& stats,
                    const SphereObserver& observer = {});

SphereResult run_sphere(const CovarianceOperator& q, const SphereConfig& config);
SphereResult run_sphere(const CovarianceOperator& q, SphereAssignment start, const SphereConfig& config);

struct SphereEmbedding {
    SphereResult run;
    EmbeddingMatrix embedding;
};

/// run_sphere followed by the QR step.
SphereEmbedding sphere_embed(const CovarianceOperator& q, const SphereConfig& config);

}  // namespace cafe
