#pragma once

#include <cstddef>
#include <span>

#include "cafe/matrix.hpp"

namespace cafe {

/**
 * A symmetric n x n matrix with zero row sums that is never stored densely.
 *
 * Both the modularity matrix of a sampled graph (sparse minus rank one) and
 * the Gram matrix X X^T of centered data implement this interface, so the
 * clustering, sphere and QR code runs unchanged on either.
 *
 * The sequential algorithms visit one node at a time and need
 *   z_u = sum_{w != u} q(w,u) h_w
 * in time proportional to the local support of u. Implementations keep a
 * small aggregate of H (the marginal-weighted column sums for a graph,
 * X^T H for a point cloud) and update it after every row change.
 */
class CovarianceOperator {
public:
    virtual ~CovarianceOperator() = default;

    virtual std::size_t size() const = 0;

    /// q(u,w) including the diagonal.
    virtual double raw_covariance(std::size_t u, std::size_t w) const = 0;

    /// Q H (or Q_0 H with the diagonal removed when zero_diagonal is set).
    virtual Matrix product(const Matrix& h, bool zero_diagonal) const = 0;

    /// Aggregate of H consumed by off_diagonal_product.
    virtual Matrix aggregate(const Matrix& h) const = 0;

    /// Writes z_u = sum_{w != u} q(w,u) h_w into z and returns the number of
    /// multiply-adds spent, for instrumentation.
    virtual std::size_t off_diagonal_product(std::size_t u, const Matrix& h, const Matrix& agg,
                                             std::span<double> z) const = 0;

    /// Reflects h_u <- h_u + delta in the aggregate.
    virtual void update_aggregate(Matrix& agg, std::size_t u, std::span<const double> delta) const = 0;

    /// Upper bound on the spectral radius; used to shift orthogonal iteration.
    virtual double spectral_radius_bound() const = 0;

    bool diag_zeroed() const { return diag_zeroed_; }

    double covariance(std::size_t u, std::size_t w) const;

    /// Q H honoring the diag_zeroed flag.
    Matrix apply(const Matrix& h) const { return product(h, diag_zeroed_); }

    /// Dense copy; only sensible for small n.
    Matrix dense(bool zero_diagonal = false) const;

    /// sum_u q(u,u).
    double trace() const;

protected:
    explicit CovarianceOperator(bool diag_zeroed) : diag_zeroed_(diag_zeroed) {}

    void check_node(std::size_t u) const;
    void check_rows(const Matrix& h) const;

private:
    bool diag_zeroed_;
};

/// tr(H^T Q H) on the true diagonal, computed through product().
double trace_objective(const CovarianceOperator& q, const Matrix& h);

/// tr(H^T Q_0 H) with q(u,u) treated as zero.
double off_diagonal_objective(const CovarianceOperator& q, const Matrix& h);

}  // namespace cafe
