#pragma once

#include <cstddef>
#include <span>

#include "cafe/covariance_operator.hpp"
#include "cafe/matrix.hpp"

namespace cafe {

/// Eigenpairs of Q, eigenvalues descending. Columns of vectors pair with
/// values; the largest-magnitude entry of each column is positive.
struct Spectrum {
    Vector values;
    Matrix vectors;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

enum class SpectrumMode { full, topk };

struct EigenOptions {
    SpectrumMode mode = SpectrumMode::full;
    std::size_t k = 0;              ///< number of leading pairs for topk
    double tol = 1e-10;             ///< subspace change for topk
    std::size_t max_iterations = 10000;
    std::size_t jacobi_limit = 200; ///< full mode uses Jacobi up to this n, Householder+QL above
};

/// Full mode materializes Q (n <= 5000). topk runs orthogonal iteration on
/// the shifted implicit operator Q + sigma I with a Rayleigh-Ritz step.
Spectrum eigendecompose(const CovarianceOperator& q, const EigenOptions& options = {});

/// y.z / (|y| |z|); throws on a zero vector.
double cosine(std::span<const double> y, std::span<const double> z);
double cosine(const Vector& y, const Vector& z);

/// Quantities of the K=2 eigenvector bound for x = h_1 / |h_1|.
struct BoundReport {
    double lambda1 = 0.0;
    double delta1 = 0.0;   ///< max(lambda_2, -lambda_n) / lambda_1
    double epsilon = 0.0;  ///< 1 - x^T Q x / lambda_1
    double cos_x = 0.0;    ///< COS(v_1, x)
    double cos_qx = 0.0;   ///< COS(v_1, Q x)
    double bound_x = 0.0;
    double bound_qx = 0.0;
    bool spectral_gap = false;
    bool applicable = false;

    /// All three inequalities, checked with `slack`; vacuously true when not applicable.
    bool holds(double slack = 1e-12) const;
};

/// Evaluates the bound for the first column of h on the true-diagonal Q.
BoundReport eigenvector_bound(const CovarianceOperator& q, const Matrix& h);

/// Same, with the spectrum supplied by the caller.
BoundReport eigenvector_bound(const CovarianceOperator& q, const Matrix& h, const Spectrum& spectrum);

/// residual_j = 1 - sum_l (Hhat_j . v_l)^2 for each column j of h_hat.
Vector projection_residual(const Matrix& h_hat, const Matrix& v_k);

}  // namespace cafe
