#include "cafe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cafe/error.hpp"

namespace cafe::linalg {

ThinQR thin_qr(const Matrix& a, double rel_tol) {
    const Eigen::Index n = a.rows();
    const Eigen::Index k = a.cols();
    ThinQR out;
    Matrix q(n, k);
    Matrix r = Matrix::Zero(k, k);
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
        Vector v = a.col(j);
        const double original = v.norm();
        Vector coeff = Vector::Zero(rank);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < rank; ++i) {
                const double c = q.col(i).dot(v);
                coeff(i) += c;
                v -= c * q.col(i);
            }
        }
        const double residual = v.norm();
        if (!(original > 0.0) || residual <= rel_tol * original || residual < 1e-300) {
            out.dropped.push_back(static_cast<std::size_t>(j));
            continue;
        }
        q.col(rank) = v / residual;
        r.block(0, rank, rank, 1) = coeff;
        r(rank, rank) = residual;
        out.kept.push_back(static_cast<std::size_t>(j));
        ++rank;
    }
    out.q = q.leftCols(rank);
    out.r = r.topLeftCorner(rank, rank);
    return out;
}

void canonicalize(SymmetricEigen& e) {
    const Eigen::Index n = e.values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return e.values(a) > e.values(b); });
    Vector values(n);
    Matrix vectors(e.vectors.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        values(i) = e.values(order[static_cast<std::size_t>(i)]);
        vectors.col(i) = e.vectors.col(order[static_cast<std::size_t>(i)]);
        Eigen::Index arg = 0;
        vectors.col(i).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, i) < 0.0) vectors.col(i) = -vectors.col(i);
    }
    e.values = std::move(values);
    e.vectors = std::move(vectors);
}

SymmetricEigen jacobi_eigen(const Matrix& input, double tol, std::size_t max_sweeps) {
    if (input.rows() != input.cols()) throw InputError("jacobi_eigen needs a square matrix");
    const Eigen::Index n = input.rows();
    Matrix a = input;
    Matrix v = Matrix::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) <= tol * scale) break;

        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // A <- J^T A J on rows/cols p and q.
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    SymmetricEigen e{a.diagonal(), v};
    canonicalize(e);
    return e;
}

namespace {

// Householder reduction to tridiagonal form (after the EISPACK tred2
// routine). On exit v holds the accumulated transform, d the diagonal and
// e the subdiagonal in e[1..n-1].
void tred2(Matrix& v, Vector& d, Vector& e) {
    const Eigen::Index n = v.rows();
    for (Eigen::Index j = 0; j < n; ++j) d(j) = v(n - 1, j);

    for (Eigen::Index i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (Eigen::Index k = 0; k < i; ++k) scale += std::abs(d(k));
        if (scale == 0.0) {
            e(i) = d(i - 1);
            for (Eigen::Index j = 0; j < i; ++j) {
                d(j) = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (Eigen::Index k = 0; k < i; ++k) {
                d(k) /= scale;
                h += d(k) * d(k);
            }
            double f = d(i - 1);
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e(i) = scale * g;
            h -= f * g;
            d(i - 1) = f - g;
            for (Eigen::Index j = 0; j < i; ++j) e(j) = 0.0;

            for (Eigen::Index j = 0; j < i; ++j) {
                f = d(j);
                v(j, i) = f;
                g = e(j) + v(j, j) * f;
                for (Eigen::Index k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d(k);
                    e(k) += v(k, j) * f;
                }
                e(j) = g;
            }
            f = 0.0;
            for (Eigen::Index j = 0; j < i; ++j) {
                e(j) /= h;
                f += e(j) * d(j);
            }
            const double hh = f / (h + h);
            for (Eigen::Index j = 0; j < i; ++j) e(j) -= hh * d(j);
            for (Eigen::Index j = 0; j < i; ++j) {
                f = d(j);
                g = e(j);
                for (Eigen::Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e(k) + g * d(k));
                d(j) = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d(i) = h;
    }

    for (Eigen::Index i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d(i + 1);
        if (h != 0.0) {
            for (Eigen::Index k = 0; k <= i; ++k) d(k) = v(k, i + 1) / h;
            for (Eigen::Index j = 0; j <= i; ++j) {
                double g = 0.0;
                for (Eigen::Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (Eigen::Index k = 0; k <= i; ++k) v(k, j) -= g * d(k);
            }
        }
        for (Eigen::Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        d(j) = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e(0) = 0.0;
}

// Implicit QL on the tridiagonal matrix (EISPACK tql2).
void tql2(Matrix& v, Vector& d, Vector& e) {
    const Eigen::Index n = v.rows();
    for (Eigen::Index i = 1; i < n; ++i) e(i - 1) = e(i);
    e(n - 1) = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (Eigen::Index l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
        Eigen::Index m = l;
        while (m < n) {
            if (std::abs(e(m)) <= eps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 200) throw InvariantError("tridiagonal QL failed to converge");
                double g = d(l);
                double p = (d(l + 1) - g) / (2.0 * e(l));
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d(l) = e(l) / (p + r);
                d(l + 1) = e(l) * (p + r);
                const double dl1 = d(l + 1);
                double h = g - d(l);
                for (Eigen::Index i = l + 2; i < n; ++i) d(i) -= h;
                f += h;

                p = d(m);
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e(l + 1);
                double s = 0.0;
                double s2 = 0.0;
                for (Eigen::Index i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e(i);
                    h = c * p;
                    r = std::hypot(p, e(i));
                    e(i + 1) = s * r;
                    s = e(i) / r;
                    c = p / r;
                    p = c * d(i) - s * g;
                    d(i + 1) = h + s * (c * g + s * d(i));
                    for (Eigen::Index k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                    if (i == 0) break;
                }
                p = -s * s2 * c3 * el1 * e(l) / dl1;
                e(l) = s * p;
                d(l) = c * p;
            } while (std::abs(e(l)) > eps * tst1);
        }
        d(l) = d(l) + f;
        e(l) = 0.0;
    }
}

}  // namespace

SymmetricEigen tridiagonal_eigen(const Matrix& input) {
    if (input.rows() != input.cols()) throw InputError("tridiagonal_eigen needs a square matrix");
    const Eigen::Index n = input.rows();
    if (n == 0) return {};
    Matrix v = input;
    Vector d(n);
    Vector e(n);
    tred2(v, d, e);
    tql2(v, d, e);
    SymmetricEigen out{d, v};
    canonicalize(out);
    return out;
}

}  // namespace cafe::linalg
