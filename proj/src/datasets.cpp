#include "sfvq/datasets.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "sfvq/errors.hpp"

namespace sfvq {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<std::array<double, 2>, 5> pentagon_vertices() {
    std::array<std::array<double, 2>, 5> v{};
    for (int k = 0; k < 5; ++k) {
        // one vertex pointing up, circumradius 1
        const double a = kPi / 2.0 + 2.0 * kPi * k / 5.0;
        v[k] = {std::cos(a), std::sin(a)};
    }
    return v;
}

} // namespace

bool point_in_pentagon(double x, double y) {
    static const auto verts = pentagon_vertices();
    // convex polygon with counter-clockwise vertices: inside iff every edge
    // cross product is non-negative
    for (int k = 0; k < 5; ++k) {
        const auto& a = verts[k];
        const auto& b = verts[(k + 1) % 5];
        const double cross = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
        if (cross < 0.0)
            return false;
    }
    return true;
}

DistributionKind kind_from_string(std::string_view name) {
    if (name == "pentagon2d") return DistributionKind::Pentagon2D;
    if (name == "moons3d") return DistributionKind::Moons3D;
    if (name == "circles3d") return DistributionKind::Circles3D;
    if (name == "spiral3d") return DistributionKind::Spiral3D;
    if (name == "gaussian") return DistributionKind::Gaussian;
    throw InvalidArgument("unknown distribution kind: " + std::string(name));
}

std::string to_string(DistributionKind kind) {
    switch (kind) {
    case DistributionKind::Pentagon2D: return "pentagon2d";
    case DistributionKind::Moons3D: return "moons3d";
    case DistributionKind::Circles3D: return "circles3d";
    case DistributionKind::Spiral3D: return "spiral3d";
    case DistributionKind::Gaussian: return "gaussian";
    }
    throw InvalidArgument("unknown distribution kind value");
}

VectorSet generate(const DistributionParams& params, std::size_t n,
                   std::uint64_t seed) {
    if (n == 0)
        throw InvalidArgument("generate: requested an empty sample set");
    if (!(params.noise >= 0.0) || !std::isfinite(params.noise))
        throw InvalidArgument("generate: noise scale must be finite and >= 0");
    if (!std::isfinite(params.scale))
        throw InvalidArgument("generate: scale must be finite");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    VectorSet out;
    switch (params.kind) {
    case DistributionKind::Pentagon2D: {
        out = VectorSet(2, n);
        for (std::size_t i = 0; i < n; ++i) {
            double x, y;
            do {
                x = 2.0 * u01(rng) - 1.0;
                y = 2.0 * u01(rng) - 1.0;
            } while (!point_in_pentagon(x, y));
            out.row(i)[0] = x;
            out.row(i)[1] = y;
        }
        break;
    }
    case DistributionKind::Moons3D: {
        out = VectorSet(3, n);
        const std::size_t n_outer = n - n / 2;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = kPi * u01(rng);
            double x, y;
            if (i < n_outer) {
                x = std::cos(t);
                y = std::sin(t);
            } else {
                x = 1.0 - std::cos(t);
                y = 0.5 - std::sin(t);
            }
            out.row(i)[0] = x + params.noise * gauss(rng);
            out.row(i)[1] = y + params.noise * gauss(rng) + params.moons_offset;
            out.row(i)[2] = params.noise * gauss(rng);
        }
        break;
    }
    case DistributionKind::Circles3D: {
        out = VectorSet(3, n);
        const std::size_t n_outer = n - n / 2;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * u01(rng);
            const double r = (i < n_outer) ? 1.0 : params.circles_factor;
            out.row(i)[0] = r * std::cos(t) + params.noise * gauss(rng);
            out.row(i)[1] = r * std::sin(t) + params.noise * gauss(rng);
            out.row(i)[2] = params.noise * gauss(rng);
        }
        break;
    }
    case DistributionKind::Spiral3D: {
        out = VectorSet(3, n);
        const double total = 2.0 * kPi * params.spiral_turns;
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = total * u01(rng);
            const double r = theta / total;
            out.row(i)[0] = r * std::cos(theta) + params.noise * gauss(rng);
            out.row(i)[1] = r * std::sin(theta) + params.noise * gauss(rng);
            out.row(i)[2] = params.noise * gauss(rng);
        }
        break;
    }
    case DistributionKind::Gaussian: {
        if (params.gaussian_dim == 0)
            throw InvalidArgument("generate: gaussian dimension must be positive");
        out = VectorSet(params.gaussian_dim, n);
        for (double& v : out.data)
            v = gauss(rng);
        break;
    }
    default:
        throw InvalidArgument("generate: unknown distribution kind");
    }

    if (params.scale != 1.0)
        for (double& v : out.data)
            v *= params.scale;

    out.validate();
    return out;
}

namespace {

// Standard Hilbert d2xy on a 2^order grid.
void hilbert_d2xy(std::uint64_t side, std::uint64_t d, std::uint64_t& x,
                  std::uint64_t& y) {
    x = 0;
    y = 0;
    std::uint64_t t = d;
    for (std::uint64_t s = 1; s < side; s <<= 1) {
        const std::uint64_t rx = 1 & (t / 2);
        const std::uint64_t ry = 1 & (t ^ rx);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
}

} // namespace

VectorSet hilbert_corners(int order) {
    if (order < 1 || order > 10)
        throw InvalidArgument("hilbert_corners: order must be in [1, 10]");
    const std::uint64_t side = std::uint64_t{1} << order;
    const std::uint64_t total = side * side;
    VectorSet out(2, total);
    for (std::uint64_t d = 0; d < total; ++d) {
        std::uint64_t x = 0, y = 0;
        hilbert_d2xy(side, d, x, y);
        out.row(d)[0] = (static_cast<double>(x) + 0.5) / static_cast<double>(side);
        out.row(d)[1] = (static_cast<double>(y) + 0.5) / static_cast<double>(side);
    }
    return out;
}

} // namespace sfvq
