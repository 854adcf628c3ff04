#ifndef SFVQ_DIRECTIONS_HPP
#define SFVQ_DIRECTIONS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfvq/quantizer.hpp"
#include "sfvq/vector_set.hpp"

namespace sfvq {

/// A unit direction in latent space plus its provenance: the adjacent
/// codeword pair it was taken from. layer_mask is carried as opaque
/// metadata (e.g. "W3-W8").
struct DirectionVec {
    std::vector<double> vector; // unit norm
    std::size_t pair_lo = 0;    // from codewords (pair_lo, pair_lo + 1)
    double raw_norm = 0.0;      // ||c_{i+1} - c_i|| before normalization
    std::string label;
    std::string layer_mask;
};

/// Row i of source maps to row i of image under some external map.
struct PairedSamples {
    VectorSet source;
    VectorSet image;
};

struct PullbackResult {
    Codebook codebook; // source-space codebook, curve order preserved
    // true where the cell had no samples and the value was inherited from
    // the nearest assigned neighbor along the curve
    std::vector<bool> filled_from_neighbor;
};

// (c_{i+1} - c_i) / ||c_{i+1} - c_i|| with provenance. i is a 0-based
// segment index in [0, N-2].
DirectionVec extract_direction(const Codebook& cb, std::size_t i);

// Angle between two directions in degrees, in [0, 180].
double angle_deg(const DirectionVec& d1, const DirectionVec& d2);

// w + sigma * d. Negative sigma walks the direction backwards.
std::vector<double> apply_shift(std::span<const double> w, const DirectionVec& d,
                                double sigma);

// k equally spaced points on segment i (endpoints included), each perturbed
// by i.i.d. Gaussian noise of the given std per coordinate.
VectorSet sample_line(const Codebook& cb, std::size_t i, std::size_t k,
                      double noise_std, std::uint64_t seed);

// Maps a codebook from image space back to source space: each image row is
// assigned to its nearest codeword and every codeword becomes the mean of
// its assigned source rows. Empty cells inherit the nearest assigned curve
// neighbor and are flagged.
PullbackResult pullback_codebook(const PairedSamples& pairs,
                                 const Codebook& codebook_image);

} // namespace sfvq

#endif
