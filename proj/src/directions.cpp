#include "sfvq/directions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sfvq/errors.hpp"

namespace sfvq {

DirectionVec extract_direction(const Codebook& cb, std::size_t i) {
    if (cb.size() < 2 || i + 1 >= cb.size())
        throw InvalidArgument("extract_direction: segment index " +
                              std::to_string(i) + " out of range");
    const std::size_t dim = cb.dim;
    DirectionVec d;
    d.vector.resize(dim);
    const double* a = cb.word(i);
    const double* b = cb.word(i + 1);
    for (std::size_t k = 0; k < dim; ++k)
        d.vector[k] = b[k] - a[k];
    d.raw_norm = norm(d.vector.data(), dim);
    if (d.raw_norm == 0.0)
        throw InvalidArgument("extract_direction: codewords " + std::to_string(i) +
                              " and " + std::to_string(i + 1) + " coincide");
    for (double& v : d.vector)
        v /= d.raw_norm;
    d.pair_lo = i;
    return d;
}

double angle_deg(const DirectionVec& d1, const DirectionVec& d2) {
    if (d1.vector.size() != d2.vector.size())
        throw DimensionError("angle_deg: direction dimensions differ");
    const double c = std::clamp(
        dot(d1.vector.data(), d2.vector.data(), d1.vector.size()), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

std::vector<double> apply_shift(std::span<const double> w, const DirectionVec& d,
                                double sigma) {
    if (w.size() != d.vector.size())
        throw DimensionError("apply_shift: vector/direction dimensions differ");
    if (!std::isfinite(sigma))
        throw NumericError("apply_shift: sigma must be finite");
    std::vector<double> out(w.begin(), w.end());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] += sigma * d.vector[k];
    return out;
}

VectorSet sample_line(const Codebook& cb, std::size_t i, std::size_t k,
                      double noise_std, std::uint64_t seed) {
    if (cb.size() < 2 || i + 1 >= cb.size())
        throw InvalidArgument("sample_line: segment index out of range");
    if (k < 2)
        throw InvalidArgument("sample_line: need at least 2 points");
    if (!(noise_std >= 0.0))
        throw InvalidArgument("sample_line: noise std must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double* a = cb.word(i);
    const double* b = cb.word(i + 1);
    VectorSet out(cb.dim, k);
    for (std::size_t m = 0; m < k; ++m) {
        const double t = static_cast<double>(m) / static_cast<double>(k - 1);
        double* row = out.row(m);
        for (std::size_t d = 0; d < cb.dim; ++d)
            row[d] = (1.0 - t) * a[d] + t * b[d] + noise_std * gauss(rng);
    }
    return out;
}

PullbackResult pullback_codebook(const PairedSamples& pairs,
                                 const Codebook& codebook_image) {
    if (pairs.source.count != pairs.image.count)
        throw DimensionError("pullback_codebook: source/image counts differ");
    if (pairs.image.dim != codebook_image.dim)
        throw DimensionError("pullback_codebook: image dimension does not match "
                             "the codebook");
    if (pairs.source.count == 0)
        throw InvalidArgument("pullback_codebook: no paired samples");
    pairs.source.validate();
    pairs.image.validate();

    const std::size_t n = codebook_image.size();
    const std::size_t src_dim = pairs.source.dim;

    std::vector<double> sums(n * src_dim, 0.0);
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t r = 0; r < pairs.image.count; ++r) {
        const auto nearest = quantize_nearest(
            std::span(pairs.image.row(r), pairs.image.dim), codebook_image);
        double* s = sums.data() + nearest.index * src_dim;
        const double* src = pairs.source.row(r);
        for (std::size_t d = 0; d < src_dim; ++d)
            s[d] += src[d];
        counts[nearest.index] += 1;
    }

    PullbackResult result;
    result.codebook = Codebook(src_dim, n);
    result.filled_from_neighbor.assign(n, false);
    for (std::size_t c = 0; c < n; ++c) {
        if (counts[c] == 0)
            continue;
        double* w = result.codebook.word(c);
        for (std::size_t d = 0; d < src_dim; ++d)
            w[d] = sums[c * src_dim + d] / static_cast<double>(counts[c]);
    }

    // Empty cells inherit the nearest assigned neighbor along the curve
    // (lower index wins a tie in curve distance).
    for (std::size_t c = 0; c < n; ++c) {
        if (counts[c] != 0)
            continue;
        std::size_t donor = n;
        for (std::size_t offset = 1; offset < n && donor == n; ++offset) {
            if (c >= offset && counts[c - offset] != 0)
                donor = c - offset;
            else if (c + offset < n && counts[c + offset] != 0)
                donor = c + offset;
        }
        // pairs.count >= 1 guarantees some assigned cell exists
        std::copy(result.codebook.word(donor),
                  result.codebook.word(donor) + src_dim,
                  result.codebook.word(c));
        result.filled_from_neighbor[c] = true;
    }
    return result;
}

} // namespace sfvq
