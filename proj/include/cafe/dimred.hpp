#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cafe/cafe_gcn.hpp"
#include "cafe/covariance_operator.hpp"
#include "cafe/matrix.hpp"

namespace cafe {

struct PointCloud {
    Matrix x;  ///< n x L coordinates
    bool centered = false;

    std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t dimension() const { return static_cast<std::size_t>(x.cols()); }
};

/// Subtracts the column means.
PointCloud center(const Matrix& x);
PointCloud center(const PointCloud& cloud);

/// X Omega for a seeded d x L matrix Omega with orthonormal rows.
PointCloud embed_lift(const PointCloud& cloud, std::size_t l, std::uint64_t seed);

/// Q = X X^T for centered X, applied as X (X^T H) in O(n L K).
class GramOperator final : public CovarianceOperator {
public:
    /// Throws InputError unless every column of x sums to zero (relative 1e-9).
    explicit GramOperator(const PointCloud& cloud);

    const Matrix& points() const { return x_; }

    std::size_t size() const override { return static_cast<std::size_t>(x_.rows()); }
    double raw_covariance(std::size_t u, std::size_t w) const override;
    Matrix product(const Matrix& h, bool zero_diagonal) const override;
    /// W = X^T H, L x K.
    Matrix aggregate(const Matrix& h) const override;
    std::size_t off_diagonal_product(std::size_t u, const Matrix& h, const Matrix& agg,
                                     std::span<double> z) const override;
    void update_aggregate(Matrix& agg, std::size_t u, std::span<const double> delta) const override;
    double spectral_radius_bound() const override;

private:
    Matrix x_;
    Vector norms2_;
};

GramOperator gram_modularity(const PointCloud& cloud);

struct WeightIteration {
    Matrix w;  ///< L x K
    std::size_t iterations = 0;
    bool converged = false;
};

/// Synchronous W <- X^T softmax(theta X W), starting from W = X^T H0. Stops
/// once |dW| <= 1e-9 |W| or after max_iterations.
WeightIteration weight_iteration(const PointCloud& cloud, const Matrix& h0, double theta,
                                 std::size_t max_iterations = 1000);

/// Leading principal directions of the cloud as unit n-vectors: the
/// eigenvectors of X X^T with nonzero eigenvalue, computed from X^T X.
struct Principal {
    Vector values;   ///< eigenvalues of X X^T, descending
    Matrix vectors;  ///< n x r
};
Principal principal_components(const PointCloud& cloud, std::size_t k);

enum class ReduceMethod { cafe, sphere };

struct ReduceOptions {
    std::size_t k = 6;
    double theta = 0.01;
    double beta = 0.5;
    ReduceMethod method = ReduceMethod::cafe;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 200;
    double tol = 1e-9;
};

struct ReduceResult {
    Matrix h;                 ///< full n x K assignment, nothing pruned
    EmbeddingMatrix embedding;
    Vector residuals;         ///< per embedding column against the top-K principal vectors
    Principal pca;
    std::size_t sweeps = 0;
    double objective = 0.0;
};

/// Centers if needed and runs the chosen GCN on the Gram operator.
ReduceResult reduce(const PointCloud& cloud, const ReduceOptions& options);

/// Columns with residual <= tol, in order.
std::vector<std::size_t> low_residual_columns(const Vector& residuals, double tol = 1e-3);

/// Coordinates of the centered cloud projected onto span(Hhat(:, columns)),
/// expressed in that subspace (n x columns.size()).
Matrix reconstruct(const PointCloud& cloud, const Matrix& h_hat, const std::vector<std::size_t>& columns);

/// Pearson correlation of the upper-triangle pairwise distances.
double distance_correlation(const Matrix& a, const Matrix& b);

/// Two concentric circles of radius 1 and 2 with n/2 evenly spaced points each.
Matrix concentric_circles(std::size_t n = 200);

/// Parametric torus on a grid: major radius big_r, minor radius small_r.
Matrix torus(std::size_t major_steps = 20, std::size_t minor_steps = 20, double big_r = 3.0, double small_r = 1.0);

/// Whitespace-separated coordinates, one point per line; '#' starts a comment.
Matrix read_xyz(const std::string& path);

}  // namespace cafe
