#include "cafe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cafe/error.hpp"
#include "cafe/linalg.hpp"

namespace cafe {

namespace {

Spectrum from_eigen(linalg::SymmetricEigen e) { return Spectrum{std::move(e.values), std::move(e.vectors)}; }

Spectrum full_spectrum(const CovarianceOperator& q, const EigenOptions& options) {
    if (q.size() > 5000) throw InputError("full spectrum limited to n <= 5000");
    const Matrix dense = q.dense(false);
    if (q.size() <= options.jacobi_limit) return from_eigen(linalg::jacobi_eigen(dense));
    return from_eigen(linalg::tridiagonal_eigen(dense));
}

Spectrum orthogonal_iteration(const CovarianceOperator& q, const EigenOptions& options) {
    const std::size_t n = q.size();
    const std::size_t k = options.k;
    if (k == 0 || k > n) throw InputError("topk needs 1 <= k <= n");

    // Q + sigma I is positive semidefinite, so its dominant subspace is the
    // algebraically largest one of Q.
    const double sigma = q.spectral_radius_bound() * 1.01 + 1e-300;
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss;
    Matrix v(n, k);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = gauss(rng);
    v = linalg::thin_qr(v).q;

    Vector ritz;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        Matrix w = q.product(v, false) + sigma * v;
        auto qr = linalg::thin_qr(w, 1e-14);
        if (qr.q.cols() != static_cast<Eigen::Index>(k))
            throw ConvergenceError("orthogonal iteration lost rank at iteration " + std::to_string(it));
        Matrix next = std::move(qr.q);
        const Matrix t = next.transpose() * q.product(next, false);
        const Matrix sym = 0.5 * (t + t.transpose());
        auto small = linalg::jacobi_eigen(sym);
        next = next * small.vectors;
        ritz = small.values;

        const Matrix leak = next - v * (v.transpose() * next);
        v = std::move(next);
        if (leak.norm() <= options.tol) {
            linalg::SymmetricEigen e{ritz, v};
            linalg::canonicalize(e);
            return from_eigen(std::move(e));
        }
    }
    throw ConvergenceError("orthogonal iteration did not converge in " + std::to_string(options.max_iterations) +
                           " iterations");
}

}  // namespace

Spectrum eigendecompose(const CovarianceOperator& q, const EigenOptions& options) {
    if (options.mode == SpectrumMode::full) return full_spectrum(q, options);
    return orthogonal_iteration(q, options);
}

double cosine(std::span<const double> y, std::span<const double> z) {
    if (y.size() != z.size()) throw InputError("cosine of vectors with different lengths");
    double yz = 0.0;
    double yy = 0.0;
    double zz = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        yz += y[i] * z[i];
        yy += y[i] * y[i];
        zz += z[i] * z[i];
    }
    if (yy == 0.0 || zz == 0.0) throw InputError("cosine of a zero vector");
    const double c = yz / (std::sqrt(yy) * std::sqrt(zz));
    return std::clamp(c, -1.0, 1.0);
}

double cosine(const Vector& y, const Vector& z) {
    return cosine(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                  std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

bool BoundReport::holds(double slack) const {
    if (!applicable) return true;
    return cos_x >= bound_x - slack && cos_qx >= cos_x - slack && cos_qx >= bound_qx - slack;
}

BoundReport eigenvector_bound(const CovarianceOperator& q, const Matrix& h) {
    return eigenvector_bound(q, h, eigendecompose(q));
}

BoundReport eigenvector_bound(const CovarianceOperator& q, const Matrix& h, const Spectrum& spectrum) {
    const std::size_t n = q.size();
    if (static_cast<std::size_t>(h.rows()) != n || h.cols() < 1) throw InputError("assignment must be n x K with K >= 1");
    if (spectrum.size() != n) throw InputError("bound report needs the full spectrum");

    BoundReport r;
    const double l1 = spectrum.values(0);
    const double l2 = n > 1 ? spectrum.values(1) : 0.0;
    const double ln = spectrum.values(static_cast<Eigen::Index>(n - 1));
    const double slem = std::max(l2, -ln);
    const double scale = spectrum.values.cwiseAbs().maxCoeff();
    r.lambda1 = l1;
    r.spectral_gap = l1 > 0.0 && l1 - slem > 1e-10 * scale;

    Vector x = h.col(0);
    const double xn = x.norm();
    if (!(xn > 0.0)) throw InputError("first assignment column is zero");
    x /= xn;
    const Matrix qx_m = q.product(Matrix(x), false);
    const Vector qx = qx_m.col(0);

    Vector v1 = spectrum.vectors.col(0);
    if (v1.dot(x) < 0.0) v1 = -v1;
    r.cos_x = cosine(v1, x);
    r.cos_qx = qx.norm() > 0.0 ? cosine(v1, qx) : 0.0;
    if (!r.spectral_gap) return r;

    r.delta1 = slem / l1;
    r.epsilon = 1.0 - x.dot(qx) / l1;
    // x == v1 up to rounding gives a tiny negative epsilon.
    if (r.epsilon < 0.0 && r.epsilon > -1e-12) r.epsilon = 0.0;
    r.applicable = r.epsilon >= 0.0 && r.epsilon <= 1.0 - r.delta1;
    if (!r.applicable) return r;

    const double head = std::max(0.0, 1.0 - r.epsilon - r.delta1);
    r.bound_x = std::sqrt(head / (1.0 - r.delta1));
    r.bound_qx = std::sqrt(head / (head + r.delta1 * r.delta1));
    if (head == 0.0 && r.delta1 == 0.0) r.bound_qx = 0.0;
    return r;
}

Vector projection_residual(const Matrix& h_hat, const Matrix& v_k) {
    if (h_hat.rows() != v_k.rows()) throw InputError("dimension mismatch in projection_residual");
    const Matrix c = h_hat.transpose() * v_k;  // C x K coefficients
    Vector out(h_hat.cols());
    // Clamped: rounding can push an exact 0 or 1 slightly outside.
    for (Eigen::Index j = 0; j < h_hat.cols(); ++j) out(j) = std::clamp(1.0 - c.row(j).squaredNorm(), 0.0, 1.0);
    return out;
}

}  // namespace cafe
