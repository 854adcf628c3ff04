#ifndef SFVQ_IO_HPP
#define SFVQ_IO_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "sfvq/quantizer.hpp"
#include "sfvq/vector_set.hpp"

namespace sfvq {

// Binary container: 8-byte magic "SFVQVEC1", then count and dim as 32-bit
// little-endian unsigned integers, then count*dim IEEE-754 binary32
// little-endian values in row-major order. Paths ending in .csv switch to
// one-vector-per-line decimal text instead.
void write_vectors(const std::filesystem::path& path, const VectorSet& vs);
VectorSet read_vectors(const std::filesystem::path& path);

// Standalone SVG plot: data as gray points, codewords as circles, and the
// curve as per-segment lines whose stroke darkens with segment index. For
// dim > 2 everything is projected onto the top-2 PCA directions of the data.
void render_curve_svg(const VectorSet& data, const Codebook& cb,
                      const std::filesystem::path& path);

// Binary PGM (P5), 8-bit: pixel (i,j) = round(255 * (1 - m_ij / max(m))),
// so small distances render bright. An all-zero matrix renders all-255.
void render_heatmap_pgm(const std::vector<double>& matrix, std::size_t rows,
                        std::size_t cols, const std::filesystem::path& path);

} // namespace sfvq

#endif
