#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cafe/matrix.hpp"
#include "cafe/sampled_graph.hpp"

// Seeded synthetic graphs for tests, the acceptance suite and examples.
namespace cafe::gen {

std::vector<Edge> erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Block sizes and a symmetric matrix of edge probabilities between blocks.
std::vector<Edge> stochastic_block_model(const std::vector<std::size_t>& sizes, const Matrix& probs,
                                         std::uint64_t seed);

/// Block id per node for the block sizes, in order.
std::vector<std::size_t> block_labels(const std::vector<std::size_t>& sizes);

/// `blocks` blocks of `size`, consecutive pairs of blocks forming superblocks.
std::vector<Edge> hierarchical_sbm(std::size_t blocks, std::size_t size, double p_in, double p_pair, double p_out,
                                   std::uint64_t seed);

/// Preferential attachment: every new node links to m distinct earlier nodes.
std::vector<Edge> barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

/// Two cliques of `clique` nodes joined by a path through `bridge` extra nodes
/// (bridge = 0 joins them with a single edge).
std::vector<Edge> barbell(std::size_t clique, std::size_t bridge = 0);

/// Triangles {0,1,2} and {3,4,5}, optionally joined by the edge 2-3.
std::vector<Edge> two_triangles(bool joined);

std::vector<Edge> complete_graph(std::size_t n);

}  // namespace cafe::gen
