#include "doctest.h"

#include <cmath>

#include "cafe/error.hpp"
#include "cafe/linalg.hpp"
#include "cafe/softmax_cluster.hpp"
#include "cafe/spectral.hpp"
#include "support.hpp"

using namespace cafe;

namespace {

// Dense operator wrapper so the bound code can run on an arbitrary symmetric zero-row-sum matrix.
class DenseOperator final : public CovarianceOperator {
public:
    explicit DenseOperator(Matrix q) : CovarianceOperator(false), q_(std::move(q)) {}
    std::size_t size() const override { return static_cast<std::size_t>(q_.rows()); }
    double raw_covariance(std::size_t u, std::size_t w) const override {
        return q_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(w));
    }
    Matrix product(const Matrix& h, bool zero_diagonal) const override {
        Matrix q = q_;
        if (zero_diagonal) q.diagonal().setZero();
        return q * h;
    }
    Matrix aggregate(const Matrix& h) const override { return h; }
    std::size_t off_diagonal_product(std::size_t u, const Matrix& h, const Matrix&, std::span<double> z) const override {
        const auto r = static_cast<Eigen::Index>(u);
        for (Eigen::Index c = 0; c < h.cols(); ++c)
            z[static_cast<std::size_t>(c)] = q_.row(r).dot(h.col(c)) - q_(r, r) * h(r, c);
        return static_cast<std::size_t>(q_.cols() * h.cols());
    }
    void update_aggregate(Matrix&, std::size_t, std::span<const double>) const override {}
    double spectral_radius_bound() const override { return q_.cwiseAbs().rowwise().sum().maxCoeff(); }

private:
    Matrix q_;
};

Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
    const Matrix a = testing::random_matrix(n, n, seed);
    return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("thin QR") {
    const Matrix a = testing::random_matrix(12, 4, 1);
    const auto qr = linalg::thin_qr(a);
    CHECK(qr.q.cols() == 4);
    CHECK(testing::max_orthonormality_error(qr.q) <= 1e-12);
    CHECK((qr.q * qr.r - a).cwiseAbs().maxCoeff() <= 1e-12);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(qr.r(i, i) >= 0.0);
        for (Eigen::Index j = 0; j < i; ++j) CHECK(qr.r(i, j) == 0.0);
    }

    Matrix dep = a;
    dep.col(2) = 2.0 * a.col(0) - a.col(1);
    const auto d = linalg::thin_qr(dep);
    CHECK(d.q.cols() == 3);
    REQUIRE(d.dropped.size() == 1);
    CHECK(d.dropped[0] == 2);
    CHECK(d.kept == std::vector<std::size_t>{0, 1, 3});

    Matrix zero = Matrix::Zero(5, 2);
    zero.col(1).setOnes();
    const auto z = linalg::thin_qr(zero);
    CHECK(z.kept == std::vector<std::size_t>{1});
}

TEST_CASE("in-house eigensolvers agree with the reference solver") {
    for (Eigen::Index n : {1, 2, 5, 30, 120}) {
        const Matrix a = random_symmetric(n, static_cast<std::uint64_t>(n));
        const auto ref = testing::oracle_eigen(a);
        for (auto e : {linalg::jacobi_eigen(a), linalg::tridiagonal_eigen(a)}) {
            CHECK((e.values - ref.values).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(testing::max_orthonormality_error(e.vectors) <= 1e-10);
            const Matrix recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
            CHECK((recon - a).cwiseAbs().maxCoeff() <= 1e-10);
            for (Eigen::Index j = 0; j < n; ++j) {
                Eigen::Index arg = 0;
                e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
                CHECK(e.vectors(arg, j) > 0.0);
            }
        }
    }
}

TEST_CASE("eigendecompose 2x2 by hand") {
    Matrix q(2, 2);
    q << 0.5, -0.5, -0.5, 0.5;
    const DenseOperator op(q);
    const auto s = eigendecompose(op);
    CHECK(s.values(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(s.values(1)) <= 1e-14);
    CHECK(std::abs(std::abs(s.vectors(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-14);
    CHECK(s.vectors(0, 0) == doctest::Approx(-s.vectors(1, 0)).epsilon(1e-14));
}

TEST_CASE("full and topk modes agree") {
    auto k3 = testing::modularity_of(3, gen::complete_graph(3));
    const auto full = eigendecompose(k3);
    EigenOptions top;
    top.mode = SpectrumMode::topk;
    top.k = 1;
    CHECK(std::abs(eigendecompose(k3, top).values(0) - full.values(0)) <= 1e-9);

    auto q = testing::modularity_of(40, testing::random_edges(40, 0.2, 2));
    const auto f = eigendecompose(q);
    top.k = 3;
    const auto t = eigendecompose(q, top);
    CHECK((t.values - f.values.head(3)).cwiseAbs().maxCoeff() <= 1e-9);
    // Principal angles between the two 3-dim subspaces.
    const Matrix overlap = f.vectors.leftCols(3).transpose() * t.vectors;
    const auto sv = testing::oracle_eigen(overlap.transpose() * overlap).values;
    CHECK(std::sqrt(std::max(0.0, 1.0 - sv.minCoeff())) <= 1e-6);
}

TEST_CASE("topk reports non-convergence") {
    auto k4 = testing::modularity_of(4, gen::complete_graph(4));  // lambda_1 = lambda_2 = lambda_3
    EigenOptions top;
    top.mode = SpectrumMode::topk;
    top.k = 1;
    top.max_iterations = 3;
    CHECK_THROWS_AS(eigendecompose(testing::modularity_of(40, testing::random_edges(40, 0.2, 2)), top),
                    ConvergenceError);
    top.k = 5;
    CHECK_THROWS_AS(eigendecompose(k4, top), InputError);
}

TEST_CASE("spectrum invariants on zero-row-sum matrices") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 8 + seed * 19;
        const auto edges = testing::random_weighted_edges(n, 0.3, seed);
        auto q = testing::modularity_of(n, edges);
        const auto s = eigendecompose(q);
        const Matrix dq = testing::dense_q(n, edges);
        const double scale = s.values.cwiseAbs().maxCoeff();
        CHECK((dq * s.vectors - s.vectors * s.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-8 * scale);
        CHECK(testing::max_orthonormality_error(s.vectors) <= 1e-10);
        CHECK((s.vectors * s.values.asDiagonal() * s.vectors.transpose() - dq).cwiseAbs().maxCoeff() <= 1e-8 * scale);
        for (Eigen::Index i = 1; i < s.values.size(); ++i) CHECK(s.values(i) <= s.values(i - 1));
        // The constant direction lies in the null space (which may be larger than one
        // dimension when the graph is disconnected).
        const Vector e = Vector::Ones(static_cast<Eigen::Index>(n)) / std::sqrt(static_cast<double>(n));
        double in_null = 0.0;
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            if (std::abs(s.values(i)) <= 1e-10 * scale) in_null += std::pow(s.vectors.col(i).dot(e), 2);
        CHECK(in_null >= 1.0 - 1e-8);
    }
}

TEST_CASE("cosine") {
    const Vector y = Vector::LinSpaced(5, 1.0, 5.0);
    CHECK(cosine(y, y) == doctest::Approx(1.0));
    CHECK(cosine(y, -y) == doctest::Approx(-1.0));
    Vector e1 = Vector::Zero(3);
    Vector e2 = Vector::Zero(3);
    e1(0) = 1;
    e2(1) = 1;
    CHECK(cosine(e1, e2) == 0.0);
    CHECK_THROWS_AS(cosine(e1, Vector::Zero(3)), InputError);
    CHECK_THROWS_AS(cosine(e1, Vector::Ones(2)), InputError);
}

TEST_CASE("karate has no spectral gap: |lambda_n| exceeds lambda_1") {
    auto q = testing::karate();
    const auto s = eigendecompose(q);
    CHECK(-s.values(33) > s.values(0));
    const auto r = eigenvector_bound(q, testing::random_stochastic(34, 2, 1), s);
    CHECK_FALSE(r.spectral_gap);
    CHECK_FALSE(r.applicable);
    CHECK(r.holds());
}

TEST_CASE("bound report on an exact eigenvector") {
    Matrix probs(2, 2);
    probs << 0.6, 0.02, 0.02, 0.6;
    const auto edges = gen::stochastic_block_model({20, 20}, probs, 3);
    auto q = testing::modularity_of(40, edges);
    const auto s = eigendecompose(q);
    Matrix h(40, 2);
    h.col(0) = s.vectors.col(0);
    h.col(1) = s.vectors.col(1);
    const auto r = eigenvector_bound(q, h, s);
    CHECK(r.spectral_gap);
    CHECK(r.applicable);
    CHECK(std::abs(r.epsilon) <= 1e-9);
    CHECK(r.cos_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.bound_x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.holds());
}

TEST_CASE("bound report at the epsilon = 1 - delta boundary") {
    // Diagonal Q with eigenvalues 1, 0.5, -0.25: delta1 = 0.5.
    Matrix q = Matrix::Zero(3, 3);
    q.diagonal() << 1.0, 0.5, -0.25;
    const DenseOperator op(q);
    // x^T Q x = 0.5 gives epsilon = 0.5 = 1 - delta1.
    Matrix h = Matrix::Zero(3, 1);
    // Nudged a hair inside so rounding cannot push it across.
    h(0, 0) = std::sqrt(0.6 + 1e-12);
    h(2, 0) = std::sqrt(0.4 - 1e-12);
    const auto r = eigenvector_bound(op, h);
    CHECK(r.delta1 == doctest::Approx(0.5));
    CHECK(r.epsilon == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.applicable);
    CHECK(r.bound_x <= 1e-5);
    CHECK(r.holds());
}

TEST_CASE("degenerate spectrum is inapplicable") {
    auto k4 = testing::modularity_of(4, gen::complete_graph(4));
    const Matrix h = testing::random_stochastic(4, 2, 1);
    const auto r = eigenvector_bound(k4, h);
    CHECK_FALSE(r.spectral_gap);
    CHECK_FALSE(r.applicable);
    CHECK(r.holds());
}

TEST_CASE("property: bound inequalities on gapped random matrices") {
    std::size_t applicable = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        // Planted two-block graphs: random sparse graphs rarely have lambda_1 > |lambda_n|.
        const std::size_t half = 5 + seed % 15;
        const std::size_t n = 2 * half;
        Matrix probs(2, 2);
        const double p_in = 0.4 + 0.005 * static_cast<double>(seed % 100);
        probs << p_in, 0.03, 0.03, p_in;
        const auto edges = gen::stochastic_block_model({half, half}, probs, seed);
        auto q = testing::modularity_of(n, edges);
        const auto s = eigendecompose(q);
        // Unit x near v1 so the precondition is actually exercised.
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        Vector noise(static_cast<Eigen::Index>(n));
        for (auto& v : noise) v = g(rng);
        const double mix = 0.05 * static_cast<double>(seed % 10);
        Matrix h(static_cast<Eigen::Index>(n), 2);
        h.col(0) = s.vectors.col(0) + mix * noise.normalized();
        h.col(1) = Vector::Ones(static_cast<Eigen::Index>(n)) - h.col(0);
        const auto r = eigenvector_bound(q, h, s);
        applicable += r.applicable;
        CHECK(r.holds());
        if (r.applicable) {
            CHECK(r.cos_x >= r.bound_x - 1e-12);
            CHECK(r.cos_qx >= r.cos_x - 1e-12);
            CHECK(r.cos_qx >= r.bound_qx - 1e-12);
        }
    }
    CHECK(applicable >= 20);
}

TEST_CASE("projection residual") {
    auto q = testing::karate();
    const auto s = eigendecompose(q);
    const Matrix v2 = s.vectors.leftCols(2);
    Matrix h(34, 2);
    h.col(0) = s.vectors.col(0);
    h.col(1) = s.vectors.col(5);
    const Vector r = projection_residual(h, v2);
    CHECK(std::abs(r(0)) <= 1e-12);
    CHECK(std::abs(r(1) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(projection_residual(h, Matrix::Zero(5, 2)), InputError);
}
