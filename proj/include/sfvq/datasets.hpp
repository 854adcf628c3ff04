#ifndef SFVQ_DATASETS_HPP
#define SFVQ_DATASETS_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "sfvq/vector_set.hpp"

namespace sfvq {

enum class DistributionKind {
    Pentagon2D, // uniform over a regular pentagon inscribed in the unit circle
    Moons3D,    // two interleaved half circles, lifted to 3D by noise
    Circles3D,  // two concentric circles, lifted to 3D by noise
    Spiral3D,   // Archimedean spiral, lifted to 3D by noise
    Gaussian,   // standard normal per coordinate
};

struct DistributionParams {
    DistributionKind kind = DistributionKind::Gaussian;
    std::size_t gaussian_dim = 2; // gaussian only
    double noise = 0.05;          // jitter std for the 3D shapes (all coordinates)
    double scale = 1.0;           // multiplies every output coordinate
    double circles_factor = 0.5;  // inner/outer radius ratio for circles3d
    double spiral_turns = 3.0;    // full revolutions for spiral3d
    // moons3d sits off the origin so vector norms vary along the data, the
    // regime norm-based initialization assumes; 0 recovers the centered
    // textbook placement
    double moons_offset = 4.0;
};

DistributionKind kind_from_string(std::string_view name);
std::string to_string(DistributionKind kind);

// Draws n samples from the requested distribution. Bit-identical output for
// a fixed (params, n, seed).
VectorSet generate(const DistributionParams& params, std::size_t n,
                   std::uint64_t seed);

// The 4^order corner points of the order-r Hilbert curve in the unit square,
// in curve order. Consecutive points are axis-aligned neighbors at distance
// 2^(-order). Valid orders are 1..10.
VectorSet hilbert_corners(int order);

// True if (x, y) lies inside (or on) the regular pentagon inscribed in the
// unit circle with one vertex pointing up.
bool point_in_pentagon(double x, double y);

} // namespace sfvq

#endif
