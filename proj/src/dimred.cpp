#include "cafe/dimred.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cafe/error.hpp"
#include "cafe/linalg.hpp"
#include "cafe/softmax_cluster.hpp"
#include "cafe/spectral.hpp"
#include "cafe/sphere_gcn.hpp"

namespace cafe {

PointCloud center(const Matrix& x) {
    if (x.rows() < 1) throw InputError("point cloud is empty");
    PointCloud out;
    const Eigen::RowVectorXd mean = x.colwise().mean();
    out.x = x.rowwise() - mean;
    out.centered = true;
    return out;
}

PointCloud center(const PointCloud& cloud) {
    if (cloud.centered) return cloud;
    return center(cloud.x);
}

PointCloud embed_lift(const PointCloud& cloud, std::size_t l, std::uint64_t seed) {
    const auto d = static_cast<std::size_t>(cloud.x.cols());
    if (l < d) throw InputError("lift dimension smaller than the data dimension");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix g(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = gauss(rng);
    auto qr = linalg::thin_qr(g);
    if (qr.q.cols() != static_cast<Eigen::Index>(d)) throw InvariantError("random lift lost rank");
    PointCloud out;
    out.x = cloud.x * qr.q.transpose();
    out.centered = cloud.centered;
    return out;
}

GramOperator::GramOperator(const PointCloud& cloud) : CovarianceOperator(false), x_(cloud.x) {
    const double scale = std::max(1.0, x_.cwiseAbs().maxCoeff());
    const double limit = 1e-9 * static_cast<double>(std::max<Eigen::Index>(1, x_.rows())) * scale;
    if (x_.rows() > 0 && x_.colwise().sum().cwiseAbs().maxCoeff() > limit)
        throw InputError("gram operator needs a centered point cloud");
    norms2_ = x_.rowwise().squaredNorm();
}

double GramOperator::raw_covariance(std::size_t u, std::size_t w) const {
    check_node(u);
    check_node(w);
    return x_.row(static_cast<Eigen::Index>(u)).dot(x_.row(static_cast<Eigen::Index>(w)));
}

Matrix GramOperator::product(const Matrix& h, bool zero_diagonal) const {
    check_rows(h);
    Matrix out = x_ * (x_.transpose() * h);
    if (zero_diagonal) out -= norms2_.asDiagonal() * h;
    return out;
}

Matrix GramOperator::aggregate(const Matrix& h) const {
    check_rows(h);
    return x_.transpose() * h;
}

std::size_t GramOperator::off_diagonal_product(std::size_t u, const Matrix& h, const Matrix& agg,
                                               std::span<double> z) const {
    const auto row = static_cast<Eigen::Index>(u);
    const Eigen::Index l = x_.cols();
    const Eigen::Index k = h.cols();
    for (Eigen::Index c = 0; c < k; ++c) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < l; ++i) s += x_(row, i) * agg(i, c);
        z[static_cast<std::size_t>(c)] = s - norms2_(row) * h(row, c);
    }
    return static_cast<std::size_t>((l + 1) * k);
}

void GramOperator::update_aggregate(Matrix& agg, std::size_t u, std::span<const double> delta) const {
    const auto row = static_cast<Eigen::Index>(u);
    for (Eigen::Index i = 0; i < x_.cols(); ++i)
        for (Eigen::Index c = 0; c < agg.cols(); ++c) agg(i, c) += x_(row, i) * delta[static_cast<std::size_t>(c)];
}

double GramOperator::spectral_radius_bound() const { return norms2_.sum(); }

GramOperator gram_modularity(const PointCloud& cloud) { return GramOperator(cloud); }

namespace {

void softmax_rows(Matrix& z, double theta) {
    for (Eigen::Index u = 0; u < z.rows(); ++u) {
        const double top = z.row(u).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            z(u, c) = std::exp(theta * (z(u, c) - top));
            sum += z(u, c);
        }
        z.row(u) /= sum;
    }
}

}  // namespace

WeightIteration weight_iteration(const PointCloud& cloud, const Matrix& h0, double theta, std::size_t max_iterations) {
    if (!cloud.centered) throw InputError("weight iteration needs a centered point cloud");
    if (h0.rows() != cloud.x.rows()) throw InputError("dimension mismatch in weight_iteration");
    if (!(theta > 0.0)) throw InputError("theta must be positive");
    WeightIteration out;
    out.w = cloud.x.transpose() * h0;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        Matrix h = cloud.x * out.w;
        softmax_rows(h, theta);
        Matrix next = cloud.x.transpose() * h;
        const double change = (next - out.w).norm();
        out.w = std::move(next);
        out.iterations = it;
        if (change <= 1e-9 * out.w.norm()) {
            out.converged = true;
            break;
        }
    }
    return out;
}

Principal principal_components(const PointCloud& cloud, std::size_t k) {
    const PointCloud c = center(cloud);
    const Matrix cov = c.x.transpose() * c.x;
    auto eig = linalg::jacobi_eigen(0.5 * (cov + cov.transpose()));
    const double top = eig.values.size() > 0 ? std::max(0.0, eig.values(0)) : 0.0;
    Principal out;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eig.values.size() && keep.size() < k; ++i)
        if (eig.values(i) > 1e-12 * top && eig.values(i) > 0.0) keep.push_back(i);
    out.values.resize(static_cast<Eigen::Index>(keep.size()));
    out.vectors.resize(c.x.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const auto i = keep[j];
        const auto col = static_cast<Eigen::Index>(j);
        out.values(col) = eig.values(i);
        out.vectors.col(col) = c.x * eig.vectors.col(i) / std::sqrt(eig.values(i));
    }
    return out;
}

ReduceResult reduce(const PointCloud& cloud, const ReduceOptions& options) {
    const PointCloud c = center(cloud);
    const GramOperator q(c);
    ReduceResult out;
    if (options.method == ReduceMethod::cafe) {
        ClusterConfig config;
        config.k = options.k;
        config.theta = options.theta;
        config.seed = options.seed;
        config.max_sweeps = options.max_sweeps;
        config.tol = options.tol;
        auto run = run_softmax(q, config);
        out.h = std::move(run.assignment.h);
        out.sweeps = run.sweeps;
        out.objective = run.objective;
    } else {
        SphereConfig config;
        config.k = options.k;
        config.beta = options.beta;
        config.seed = options.seed;
        config.max_sweeps = options.max_sweeps;
        config.tol = options.tol;
        auto run = run_sphere(q, config);
        out.h = std::move(run.assignment.h);
        out.sweeps = run.sweeps;
        out.objective = run.objective;
    }
    out.embedding = qr_embed(q, out.h);
    out.pca = principal_components(c, options.k);
    out.residuals = projection_residual(out.embedding.h_hat, out.pca.vectors);
    return out;
}

std::vector<std::size_t> low_residual_columns(const Vector& residuals, double tol) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < residuals.size(); ++j)
        if (residuals(j) <= tol) out.push_back(static_cast<std::size_t>(j));
    return out;
}

Matrix reconstruct(const PointCloud& cloud, const Matrix& h_hat, const std::vector<std::size_t>& columns) {
    const PointCloud c = center(cloud);
    if (h_hat.rows() != c.x.rows()) throw InputError("dimension mismatch in reconstruct");
    Matrix basis(h_hat.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] >= static_cast<std::size_t>(h_hat.cols())) throw InputError("column out of range");
        basis.col(static_cast<Eigen::Index>(j)) = h_hat.col(static_cast<Eigen::Index>(columns[j]));
    }
    // The projection B B^T X has the same pairwise distances as B M with
    // M = (B^T X X^T B)^{1/2}, which lives in columns.size() dimensions.
    const Matrix m = basis.transpose() * c.x;
    auto eig = linalg::jacobi_eigen(m * m.transpose());
    Vector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
    const Matrix root = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
    return basis * root;
}

namespace {

std::vector<double> pairwise_distances(const Matrix& a) {
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(a.rows() * (a.rows() - 1) / 2));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.rows(); ++j) d.push_back((a.row(i) - a.row(j)).norm());
    return d;
}

}  // namespace

double distance_correlation(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.rows() < 3) throw InputError("distance correlation needs matching clouds of 3+ points");
    const auto da = pairwise_distances(a);
    const auto db = pairwise_distances(b);
    const double n = static_cast<double>(da.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        ma += da[i];
        mb += db[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        sab += (da[i] - ma) * (db[i] - mb);
        saa += (da[i] - ma) * (da[i] - ma);
        sbb += (db[i] - mb) * (db[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw InputError("distance correlation of a degenerate cloud");
    return sab / std::sqrt(saa * sbb);
}

Matrix concentric_circles(std::size_t n) {
    if (n < 2 || n % 2 != 0) throw InputError("circles need an even point count");
    const std::size_t per = n / 2;
    Matrix x(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < per; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(per);
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = static_cast<Eigen::Index>(i + per);
        x(a, 0) = std::cos(t);
        x(a, 1) = std::sin(t);
        x(b, 0) = 2.0 * std::cos(t);
        x(b, 1) = 2.0 * std::sin(t);
    }
    return x;
}

Matrix torus(std::size_t major_steps, std::size_t minor_steps, double big_r, double small_r) {
    if (major_steps < 3 || minor_steps < 3) throw InputError("torus needs at least 3 steps per angle");
    Matrix x(static_cast<Eigen::Index>(major_steps * minor_steps), 3);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < major_steps; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(major_steps);
        for (std::size_t j = 0; j < minor_steps; ++j, ++row) {
            const double b = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(minor_steps);
            const double ring = big_r + small_r * std::cos(b);
            x(row, 0) = ring * std::cos(a);
            x(row, 1) = ring * std::sin(a);
            x(row, 2) = small_r * std::sin(b);
        }
    }
    return x;
}

Matrix read_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open point file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(lineno) + ": bad coordinate '" + tok + "'");
            }
            if (!std::isfinite(row.back())) throw InputError(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("no points in " + path);
    Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return x;
}

}  // namespace cafe
