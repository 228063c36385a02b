#include "doctest.h"

#include "cafe/cafe_gcn.hpp"
#include "cafe/error.hpp"
#include "cafe/spectral.hpp"
#include "support.hpp"

using namespace cafe;

namespace {

double rayleigh_trace(const Matrix& dq, const Matrix& h) { return (h.transpose() * dq * h).trace(); }

Matrix column_normalized(Matrix h) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) h.col(c).normalize();
    return h;
}

}  // namespace

TEST_CASE("prune_zero_columns") {
    Matrix h = testing::random_stochastic(6, 4, 2);
    const auto same = prune_zero_columns(h);
    CHECK(same.clusters() == 4);
    CHECK(same.h == h);

    h.col(3).setConstant(1e-13);
    const auto p = prune_zero_columns(h);
    CHECK(p.clusters() == 3);
    CHECK(p.kept == std::vector<std::size_t>{0, 1, 2});
    CHECK(p.h == h.leftCols(3));
}

TEST_CASE("qr_embed") {
    const auto edges = testing::random_weighted_edges(30, 0.2, 4);
    auto q = testing::modularity_of(30, edges);
    const Matrix dq = testing::dense_q(30, edges);

    SUBCASE("one column is a normalized power step") {
        const Matrix h = testing::random_matrix(30, 1, 1);
        const auto e = qr_embed(q, h);
        REQUIRE(e.dimension() == 1);
        const Vector ref = (dq * h).col(0).normalized();
        CHECK((e.h_hat.col(0) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("stochastic H loses one dimension because Q has zero row sums") {
        const Matrix h = testing::random_stochastic(30, 4, 3);
        const auto e = qr_embed(q, h);
        CHECK(e.dimension() == 3);
        CHECK(e.warnings.size() == 1);
        CHECK(testing::max_orthonormality_error(e.h_hat) <= 1e-10);
        // Same column space as QH.
        const Matrix qh = dq * h;
        const Matrix resid = qh - e.h_hat * (e.h_hat.transpose() * qh);
        CHECK(resid.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("uses the true diagonal even on a zeroed operator") {
        const Matrix h = testing::random_matrix(30, 2, 9);
        const auto a = qr_embed(q, h);
        const auto b = qr_embed(q.with_diag_zeroed(true), h);
        CHECK(a.h_hat == b.h_hat);
    }
}

TEST_CASE("karate K=2 embedding aligns with the top eigenvector") {
    auto q = testing::karate();
    const auto spec = testing::oracle_eigen(q.dense());
    CafeOptions o;
    o.cluster.k = 2;
    o.cluster.theta = 50;
    o.cluster.seed = 7;
    const auto r = cafe_gcn(q, o);
    CHECK(r.clusters == 2);
    double best = 0.0;
    for (Eigen::Index c = 0; c < r.embedding.h_hat.cols(); ++c)
        best = std::max(best, std::abs(cosine(Vector(r.embedding.h_hat.col(c)), Vector(spec.vectors.col(0)))));
    CHECK(best >= 0.95);
}

TEST_CASE("full-label mode") {
    auto q = testing::modularity_of(10, gen::barbell(5));
    std::vector<PinnedLabel> labels;
    std::vector<std::size_t> part;
    for (std::size_t u = 0; u < 10; ++u) {
        labels.push_back({u, u < 5 ? 0u : 1u});
        part.push_back(u < 5 ? 0 : 1);
    }
    CafeOptions o;
    o.labels = LabelMode::full;
    const auto a = cafe_gcn(q, o, labels);
    const auto b = cafe_gcn(q, o, labels);
    const auto direct = qr_embed(q, indicator_matrix(part, 2));
    CHECK(a.embedding.h_hat == direct.h_hat);
    CHECK(a.embedding.h_hat == b.embedding.h_hat);
    CHECK(a.sweeps == 0);

    labels.pop_back();
    CHECK_THROWS_AS(cafe_gcn(q, o, labels), InputError);
    o.labels = LabelMode::none;
    CHECK_THROWS_AS(cafe_gcn(q, o, labels), InputError);
}

TEST_CASE("barbell with K=5 prunes down to the two cliques") {
    auto q = testing::modularity_of(10, gen::barbell(5));
    CafeOptions o;
    o.cluster.k = 5;
    o.cluster.theta = 50;
    o.cluster.tol = 0.0;
    o.cluster.max_sweeps = 400;
    o.cluster.seed = 1;
    const auto r = cafe_gcn(q, o);
    CHECK(r.clusters == 2);
    const std::vector<std::size_t> cliques{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(testing::agreement(hardmax(r.h), cliques) == 1.0);
}

TEST_CASE("two disjoint triangles with K=3") {
    const auto edges = gen::two_triangles(false);
    auto q = testing::modularity_of(6, edges);
    const Matrix dq = testing::dense_q(6, edges);
    CafeOptions o;
    o.cluster.k = 3;
    o.cluster.theta = 50;
    o.cluster.tol = 0.0;
    o.cluster.max_sweeps = 400;
    o.cluster.seed = 2;
    const auto r = cafe_gcn(q, o);
    CHECK(r.clusters == 2);
    const double ours = rayleigh_trace(dq, r.embedding.h_hat);
    double best_indicator = -1e300;
    for (std::uint64_t mask = 1; mask < 32; ++mask) {
        std::vector<std::size_t> part(6);
        for (std::size_t u = 0; u < 6; ++u) part[u] = (mask >> u) & 1ULL;
        best_indicator = std::max(best_indicator, rayleigh_trace(dq, column_normalized(indicator_matrix(part, 2))));
    }
    CHECK(ours >= best_indicator - 1e-12);
}

TEST_CASE("two-block SBM is recovered") {
    Matrix probs(2, 2);
    probs << 0.5, 0.02, 0.02, 0.5;
    const auto edges = gen::stochastic_block_model({20, 20}, probs, 5);
    auto q = testing::modularity_of(40, edges);
    CafeOptions o;
    o.cluster.k = 2;
    o.cluster.theta = 50;
    o.cluster.seed = 5;
    const auto r = cafe_gcn(q, o);
    CHECK(testing::agreement(hardmax(r.h), gen::block_labels({20, 20})) >= 0.95);
}

TEST_CASE("coarsen") {
    const auto edges = gen::barbell(5);
    auto q = testing::modularity_of(10, edges);
    const Matrix dq = testing::dense_q(10, edges);

    SUBCASE("one cluster") {
        const std::vector<std::size_t> one(10, 4);
        const auto c = coarsen(q, one);
        REQUIRE(c.q_pooled.rows() == 1);
        CHECK(std::abs(c.q_pooled(0, 0)) <= 1e-15);
        CHECK(c.membership == std::vector<std::size_t>(10, 0));
    }
    SUBCASE("singletons reproduce Q") {
        std::vector<std::size_t> single(10);
        for (std::size_t u = 0; u < 10; ++u) single[u] = u;
        const auto c = coarsen(q, single);
        CHECK((c.q_pooled - dq).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("clique partition with gaps in the ids") {
        const std::vector<std::size_t> part{7, 7, 7, 7, 7, 2, 2, 2, 2, 2};
        const auto c = coarsen(q, part);
        CHECK(c.membership[0] == 1);
        CHECK(c.membership[9] == 0);
        CHECK(c.q_pooled == c.q_pooled.transpose());
        CHECK(std::abs(c.q_pooled.sum()) <= 1e-15);
        CHECK(std::abs(c.q_pooled.trace() - partition_modularity(q, part)) <= 1e-12);
        const Matrix h = indicator_matrix(c.membership);
        CHECK((c.q_pooled - h.transpose() * dq * h).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(std::abs(c.pooled->total_mass() - 1.0) <= 1e-12);
    }
}

TEST_CASE("multilayer") {
    SUBCASE("hierarchical SBM nests and increases") {
        const auto edges = gen::hierarchical_sbm(4, 25, 0.3, 0.12, 0.01, 3);
        auto q = testing::modularity_of(100, edges);
        MultilayerOptions o;
        o.cluster.seed = 3;
        const auto layers = multilayer(q, o);
        REQUIRE(layers.size() >= 2);
        CHECK(layers[0].clusters == 4);
        CHECK(layers[1].clusters < layers[0].clusters);
        for (std::size_t i = 0; i < layers.size(); ++i) {
            CHECK(std::abs(layers[i].modularity - partition_modularity(q, layers[i].membership)) <= 1e-10);
            CHECK(testing::max_orthonormality_error(layers[i].embedding.h_hat) <= 1e-10);
            CHECK(std::abs(layers[i].q_pooled.sum()) <= 1e-12);
            if (i > 0) {
                CHECK(layers[i].modularity > layers[i - 1].modularity);
                std::vector<long> coarse_of(layers[i - 1].clusters, -1);
                bool nested = true;
                for (std::size_t u = 0; u < 100; ++u) {
                    auto& slot = coarse_of[layers[i - 1].membership[u]];
                    if (slot < 0) slot = static_cast<long>(layers[i].membership[u]);
                    nested = nested && slot == static_cast<long>(layers[i].membership[u]);
                }
                CHECK(nested);
            }
        }
    }
    SUBCASE("two disjoint triangles stop after one level") {
        auto q = testing::modularity_of(6, gen::two_triangles(false));
        const auto layers = multilayer(q, {});
        REQUIRE(layers.size() == 1);
        const std::vector<std::size_t> cliques{0, 0, 0, 1, 1, 1};
        CHECK(testing::agreement(layers[0].membership, cliques) == 1.0);
        CHECK(layers[0].modularity == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("property: QR step does not lose Rayleigh trace against the normalized input") {
    std::size_t worse = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 20 + seed * 2;
        const auto edges = testing::random_edges(n, 0.15, seed);
        auto q = testing::modularity_of(n, edges);
        const Matrix dq = testing::dense_q(n, edges);
        CafeOptions o;
        o.cluster.k = 2 + seed % 3;
        o.cluster.theta = 20;
        o.cluster.seed = seed;
        const auto r = cafe_gcn(q, o);
        CHECK(testing::max_orthonormality_error(r.embedding.h_hat) <= 1e-10);
        worse += rayleigh_trace(dq, r.embedding.h_hat) < rayleigh_trace(dq, column_normalized(r.h)) - 1e-9;
    }
    CHECK(worse == 0);
}
