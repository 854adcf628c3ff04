#ifndef SFVQ_ORDERING_HPP
#define SFVQ_ORDERING_HPP

#include <cstddef>
#include <string_view>
#include <vector>

#include "sfvq/quantizer.hpp"

namespace sfvq {

enum class Heuristic {
    NearestNeighbor,
    Greedy,
    // Christofides with the exact blossom matching replaced by greedy
    // nearest-pair matching of the odd-degree vertices.
    ChristofidesLike,
    Identity,
};

/// A visiting order over codewords: permutation[k] is the index of the k-th
/// codeword on the path.
struct PathOrder {
    std::vector<std::size_t> permutation;
    Heuristic heuristic = Heuristic::Identity;
};

// Builds an open Hamiltonian path over the codewords. All heuristics are
// deterministic; distance ties break toward the lower index pair.
//   nearest_neighbor: NN construction from every start vertex, keep the
//     shortest result (ties toward the lower start index).
//   greedy: edges ascending by length, reject degree-3 and premature cycles,
//     stitch the leftover path.
//   christofides_like: Prim MST, greedy odd-vertex matching, Eulerian
//     circuit, shortcut repeats, cut the longest tour edge.
PathOrder order_path(const Codebook& cb, Heuristic heuristic);

// Sum of Euclidean distances between consecutive codewords in permutation
// order. Throws on anything that is not a bijection over the codebook.
double path_length(const Codebook& cb, const PathOrder& order);

// Reorders the codewords of cb by the permutation.
Codebook apply_order(const Codebook& cb, const PathOrder& order);

Heuristic heuristic_from_string(std::string_view name);

} // namespace sfvq

#endif
