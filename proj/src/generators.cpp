#include "cafe/generators.hpp"

#include <algorithm>
#include <random>

#include "cafe/error.hpp"

namespace cafe::gen {

std::vector<Edge> erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = u + 1; w < n; ++w)
            if (coin(rng)) edges.push_back({u, w, 1.0});
    return edges;
}

std::vector<std::size_t> block_labels(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < sizes.size(); ++b) out.insert(out.end(), sizes[b], b);
    return out;
}

std::vector<Edge> stochastic_block_model(const std::vector<std::size_t>& sizes, const Matrix& probs,
                                         std::uint64_t seed) {
    const auto k = static_cast<Eigen::Index>(sizes.size());
    if (probs.rows() != k || probs.cols() != k) throw InputError("block probability matrix has the wrong shape");
    const auto block = block_labels(sizes);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < block.size(); ++u)
        for (std::size_t w = u + 1; w < block.size(); ++w)
            if (unif(rng) < probs(static_cast<Eigen::Index>(block[u]), static_cast<Eigen::Index>(block[w])))
                edges.push_back({u, w, 1.0});
    return edges;
}

std::vector<Edge> hierarchical_sbm(std::size_t blocks, std::size_t size, double p_in, double p_pair, double p_out,
                                   std::uint64_t seed) {
    const auto k = static_cast<Eigen::Index>(blocks);
    Matrix probs(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) probs(i, j) = i == j ? p_in : (i / 2 == j / 2 ? p_pair : p_out);
    return stochastic_block_model(std::vector<std::size_t>(blocks, size), probs, seed);
}

std::vector<Edge> barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m < 1 || n <= m) throw InputError("preferential attachment needs n > m >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::vector<std::size_t> ends;  // each node appears once per incident edge
    // Seed with a star on the first m + 1 nodes.
    for (std::size_t u = 0; u < m; ++u) {
        edges.push_back({u, m, 1.0});
        ends.push_back(u);
        ends.push_back(m);
    }
    std::vector<std::size_t> targets;
    for (std::size_t v = m + 1; v < n; ++v) {
        targets.clear();
        std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
        while (targets.size() < m) {
            const std::size_t t = ends[pick(rng)];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (std::size_t t : targets) {
            edges.push_back({t, v, 1.0});
            ends.push_back(t);
            ends.push_back(v);
        }
    }
    return edges;
}

std::vector<Edge> barbell(std::size_t clique, std::size_t bridge) {
    if (clique < 2) throw InputError("barbell cliques need 2+ nodes");
    std::vector<Edge> edges;
    const std::size_t second = clique + bridge;
    for (std::size_t u = 0; u < clique; ++u)
        for (std::size_t w = u + 1; w < clique; ++w) {
            edges.push_back({u, w, 1.0});
            edges.push_back({second + u, second + w, 1.0});
        }
    std::size_t prev = clique - 1;
    for (std::size_t b = 0; b < bridge; ++b) {
        edges.push_back({prev, clique + b, 1.0});
        prev = clique + b;
    }
    edges.push_back({prev, second, 1.0});
    return edges;
}

std::vector<Edge> two_triangles(bool joined) {
    std::vector<Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}};
    if (joined) edges.push_back({2, 3, 1.0});
    return edges;
}

std::vector<Edge> complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = u + 1; w < n; ++w) edges.push_back({u, w, 1.0});
    return edges;
}

}  // namespace cafe::gen
