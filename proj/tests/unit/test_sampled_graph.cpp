#include "doctest.h"

#include <sstream>

#include "cafe/error.hpp"
#include "cafe/io.hpp"
#include "cafe/sampled_graph.hpp"
#include "support.hpp"

using namespace cafe;
using testing::dense_q;

TEST_CASE("triangle gives uniform pair mass") {
    const auto g = SampledGraph::from_edges(3, gen::complete_graph(3));
    for (std::size_t u = 0; u < 3; ++u) {
        CHECK(g.marginal(u) == doctest::Approx(1.0 / 3).epsilon(1e-15));
        for (std::size_t w = 0; w < 3; ++w)
            CHECK(g.probability(u, w) == doctest::Approx(u == w ? 0.0 : 1.0 / 6).epsilon(1e-15));
    }
    CHECK(std::abs(g.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("single edge") {
    const std::vector<Edge> e{{0, 1, 1.0}};
    const auto g = SampledGraph::from_edges(2, e);
    CHECK(g.probability(0, 1) == 0.5);
    CHECK(g.probability(1, 0) == 0.5);
    CHECK(g.marginal(0) == 0.5);
    CHECK(g.marginal(1) == 0.5);
}

TEST_CASE("karate club marginals") {
    const auto edges = testing::karate_edges();
    REQUIRE(edges.size() == 78);
    const auto g = SampledGraph::from_edges(edges);
    CHECK(g.size() == 34);
    CHECK(std::abs(g.total_mass() - 1.0) <= 1e-12);
    CHECK(g.marginal(g.nodes().at("0")) == doctest::Approx(16.0 / 156).epsilon(1e-14));
    CHECK(g.marginal(g.nodes().at("33")) == doctest::Approx(17.0 / 156).epsilon(1e-14));
}

TEST_CASE("edge list errors") {
    std::vector<Edge> none;
    CHECK_THROWS_WITH_AS(SampledGraph::from_edges(3, none), "empty graph", InputError);
    const std::vector<Edge> negative{{0, 1, -1.0}};
    CHECK_THROWS_WITH_AS(SampledGraph::from_edges(2, negative), "invalid weight", InputError);
    const std::vector<Edge> zero{{0, 1, 0.0}};
    CHECK_THROWS_WITH_AS(SampledGraph::from_edges(2, zero), "empty graph", InputError);
    const std::vector<Edge> nan{{0, 1, std::nan("")}};
    CHECK_THROWS_AS(SampledGraph::from_edges(2, nan), InputError);
}

TEST_CASE("multi-edges and orientation are summed") {
    const std::vector<Edge> e{{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 1.0}};
    const auto g = SampledGraph::from_edges(3, e);
    CHECK(g.probability(0, 1) == doctest::Approx(3.0 / 8));
    CHECK(g.probability(1, 0) == g.probability(0, 1));
    CHECK(g.probability(1, 2) == doctest::Approx(1.0 / 8));
}

TEST_CASE("self-loops fold into the diagonal and the marginals") {
    const std::vector<Edge> e{{0, 0, 2.0}, {0, 1, 1.0}};
    const auto g = SampledGraph::from_edges(2, e);
    CHECK(g.probability(0, 0) == doctest::Approx(0.5));
    CHECK(g.probability(0, 1) == doctest::Approx(0.25));
    CHECK(g.marginal(0) == doctest::Approx(0.75));
    CHECK(std::abs(g.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("isolated nodes get zero marginals and zero covariance rows") {
    const std::vector<Edge> e{{0, 1, 1.0}};
    const ModularityMatrix q(std::make_shared<const SampledGraph>(SampledGraph::from_edges(4, e)));
    CHECK(q.graph().marginal(3) == 0.0);
    for (std::size_t w = 0; w < 4; ++w) CHECK(q.covariance(3, w) == 0.0);
}

TEST_CASE("from_similarity") {
    SUBCASE("2x2") {
        Matrix s(2, 2);
        s << 0, 1, 1, 0;
        const auto g = SampledGraph::from_similarity(s);
        CHECK(g.probability(0, 1) == 0.5);
        CHECK(g.probability(0, 0) == 0.0);
    }
    SUBCASE("3x3 hand computed") {
        Matrix s(3, 3);
        s << 0, 2, 1, 2, 0, 1, 1, 1, 0;
        const auto g = SampledGraph::from_similarity(s);
        CHECK(g.probability(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(g.probability(0, 2) == doctest::Approx(0.125).epsilon(1e-15));
        CHECK(std::abs(g.total_mass() - 1.0) <= 1e-12);
    }
    SUBCASE("uniform off-diagonal") {
        Matrix s = Matrix::Constant(4, 4, 3.0);
        s.diagonal().setConstant(-1.0);
        const auto g = SampledGraph::from_similarity(s);
        for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t w = 0; w < 4; ++w)
                CHECK(g.probability(u, w) == doctest::Approx(u == w ? 0.0 : 1.0 / 12));
    }
    SUBCASE("asymmetric input is symmetrized") {
        Matrix s(2, 2);
        s << 0, 3, 1, 0;
        const auto g = SampledGraph::from_similarity(s);
        CHECK(g.probability(0, 1) == g.probability(1, 0));
        CHECK(g.probability(0, 1) == 0.5);
    }
    SUBCASE("constant is degenerate") {
        CHECK_THROWS_WITH_AS(SampledGraph::from_similarity(Matrix::Constant(3, 3, 2.0)), "degenerate similarity",
                             InputError);
    }
}

TEST_CASE("covariance on K3") {
    auto q = testing::modularity_of(3, gen::complete_graph(3));
    CHECK(q.covariance(0, 1) == doctest::Approx(1.0 / 18).epsilon(1e-14));
    CHECK(q.covariance(1, 1) == doctest::Approx(-1.0 / 9).epsilon(1e-14));
    for (std::size_t u = 0; u < 3; ++u) {
        double row = 0.0;
        for (std::size_t w = 0; w < 3; ++w) row += q.covariance(u, w);
        CHECK(std::abs(row) <= 1e-15);
    }
    CHECK(q.with_diag_zeroed(true).covariance(1, 1) == 0.0);
    CHECK_THROWS_AS(q.covariance(0, 3), InputError);
}

TEST_CASE("partition modularity") {
    SUBCASE("single cluster is zero") {
        auto q = testing::modularity_of(6, gen::two_triangles(true));
        const std::vector<std::size_t> one(6, 0);
        CHECK(std::abs(partition_modularity(q, one)) <= 1e-15);
    }
    SUBCASE("joined triangles against the dense double sum") {
        const auto edges = gen::two_triangles(true);
        auto q = testing::modularity_of(6, edges);
        const std::vector<std::size_t> cliques{0, 0, 0, 1, 1, 1};
        const double brute = testing::brute_modularity(dense_q(6, edges), cliques);
        CHECK(std::abs(partition_modularity(q, cliques) - brute) <= 1e-12);
        CHECK(brute == doctest::Approx(5.0 / 14).epsilon(1e-12));  // Newman value 2*(3/7 - 1/4)
    }
    SUBCASE("singletons of K3") {
        auto q = testing::modularity_of(3, gen::complete_graph(3));
        const std::vector<std::size_t> single{0, 1, 2};
        CHECK(partition_modularity(q, single) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    }
    SUBCASE("diag_zeroed drops the diagonal terms") {
        const std::vector<Edge> edges{{0, 0, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 2.0}};
        auto q = testing::modularity_of(4, edges, true);
        Matrix dq = dense_q(4, edges);
        dq.diagonal().setZero();
        const std::vector<std::size_t> part{0, 0, 1, 1};
        CHECK(std::abs(partition_modularity(q, part) - testing::brute_modularity(dq, part)) <= 1e-12);
    }
}

TEST_CASE("apply") {
    SUBCASE("ones column maps to zero") {
        auto q = testing::modularity_of(6, gen::two_triangles(true));
        const Matrix r = q.apply(Matrix::Ones(6, 1));
        CHECK(r.cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("random 6-node graph matches dense") {
        const auto edges = testing::random_weighted_edges(6, 0.6, 11);
        auto q = testing::modularity_of(6, edges);
        const Matrix h = testing::random_matrix(6, 3, 5);
        CHECK((q.apply(h) - dense_q(6, edges) * h).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("K3 with zeroed diagonal") {
        auto q = testing::modularity_of(3, gen::complete_graph(3), true);
        const Matrix r = q.apply(Matrix::Identity(3, 3));
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) CHECK(r(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 18).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch") {
        auto q = testing::modularity_of(3, gen::complete_graph(3));
        CHECK_THROWS_AS(q.apply(Matrix::Ones(4, 1)), InputError);
    }
}

TEST_CASE("property: invariants on random graphs up to n=200") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = 5 + (seed * 37) % 196;
        const auto edges = testing::random_weighted_edges(n, std::min(1.0, 6.0 / static_cast<double>(n)), seed);
        auto q = testing::modularity_of(n, edges);
        const auto& g = q.graph();
        CHECK(std::abs(g.total_mass() - 1.0) <= 1e-12);
        for (std::size_t u = 0; u < n; ++u) {
            const auto nb = g.neighbors(u);
            double m = 0.0;
            for (std::size_t i = 0; i < nb.size(); ++i) {
                CHECK(g.probability(nb[i], u) == g.probabilities(u)[i]);
                m += g.probabilities(u)[i];
            }
            CHECK(std::abs(m - g.marginal(u)) <= 1e-12);
        }
        const Matrix dq = dense_q(n, edges);
        CHECK(q.apply(Matrix::Ones(static_cast<Eigen::Index>(n), 1)).cwiseAbs().maxCoeff() <= 1e-12);
        const Matrix h = testing::random_matrix(static_cast<Eigen::Index>(n), 3, seed + 100);
        CHECK((q.apply(h) - dq * h).cwiseAbs().maxCoeff() <= 1e-12);
        Matrix dq0 = dq;
        dq0.diagonal().setZero();
        CHECK((q.product(h, true) - dq0 * h).cwiseAbs().maxCoeff() <= 1e-12);

        std::vector<std::size_t> part(n);
        for (std::size_t u = 0; u < n; ++u) part[u] = (u * 7 + seed) % 4;
        const Matrix ind = indicator_matrix(part);
        CHECK(std::abs(partition_modularity(q, part) - (ind.transpose() * q.apply(ind)).trace()) <= 1e-12);
    }
}

TEST_CASE("edge list parser") {
    std::istringstream in("# header\na b\nb c 2.5  # trailing\n\n c   a 0\n");
    const auto edges = io::parse_edge_list(in);
    REQUIRE(edges.size() == 3);
    CHECK(edges[0].weight == 1.0);
    CHECK(edges[1].weight == 2.5);
    CHECK(edges[2].u == "c");
    const auto g = SampledGraph::from_edges(edges);
    CHECK(g.nodes().label(0) == "a");
    CHECK(g.probability(g.nodes().at("b"), g.nodes().at("c")) == doctest::Approx(2.5 / 7));

    std::istringstream bad("a b -1\n");
    CHECK_THROWS_AS(io::parse_edge_list(bad), InputError);
    std::istringstream junk("a b c d\n");
    CHECK_THROWS_AS(io::parse_edge_list(junk), InputError);
    std::istringstream word("a b heavy\n");
    CHECK_THROWS_AS(io::parse_edge_list(word), InputError);
}
