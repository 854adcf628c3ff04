#include "sfvq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sfvq/analysis.hpp"
#include "sfvq/errors.hpp"

namespace sfvq {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'V', 'Q', 'V', 'E', 'C', '1'};

void put_u32_le(std::ostream& os, std::uint32_t v) {
    const char bytes[4] = {
        static_cast<char>(v & 0xff),
        static_cast<char>((v >> 8) & 0xff),
        static_cast<char>((v >> 16) & 0xff),
        static_cast<char>((v >> 24) & 0xff),
    };
    os.write(bytes, 4);
}

std::uint32_t get_u32_le(std::istream& is) {
    unsigned char bytes[4];
    is.read(reinterpret_cast<char*>(bytes), 4);
    return static_cast<std::uint32_t>(bytes[0]) |
           (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

bool has_csv_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv";
}

void write_vectors_csv(const std::filesystem::path& path, const VectorSet& vs) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());
    char buf[64];
    for (std::size_t i = 0; i < vs.count; ++i) {
        const double* row = vs.row(i);
        for (std::size_t d = 0; d < vs.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.9g", row[d]);
            if (d)
                os << ',';
            os << buf;
        }
        os << '\n';
    }
    if (!os)
        throw IoError("write failed: " + path.string());
}

VectorSet read_vectors_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open for reading: " + path.string());
    VectorSet vs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t d = 0;
        while (std::getline(ls, cell, ',')) {
            double value = 0.0;
            try {
                value = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError("bad numeric cell in " + path.string() + ": '" +
                                  cell + "'");
            }
            if (!std::isfinite(value))
                throw NumericError("non-finite value in " + path.string());
            vs.data.push_back(value);
            ++d;
        }
        if (vs.count == 0)
            vs.dim = d;
        else if (d != vs.dim)
            throw FormatError("ragged row in " + path.string());
        ++vs.count;
    }
    if (vs.count == 0)
        throw FormatError("no vectors in " + path.string());
    return vs;
}

} // namespace

void write_vectors(const std::filesystem::path& path, const VectorSet& vs) {
    vs.validate();
    if (has_csv_extension(path)) {
        write_vectors_csv(path, vs);
        return;
    }
    if (vs.count > std::numeric_limits<std::uint32_t>::max() ||
        vs.dim > std::numeric_limits<std::uint32_t>::max())
        throw FormatError("vector set too large for the container");

    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    put_u32_le(os, static_cast<std::uint32_t>(vs.count));
    put_u32_le(os, static_cast<std::uint32_t>(vs.dim));
    for (double v : vs.data) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32_le(os, bits);
    }
    if (!os)
        throw IoError("write failed: " + path.string());
}

VectorSet read_vectors(const std::filesystem::path& path) {
    if (has_csv_extension(path))
        return read_vectors_csv(path);

    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open for reading: " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("bad magic in " + path.string());

    const std::uint32_t count = get_u32_le(is);
    const std::uint32_t dim = get_u32_le(is);
    if (!is)
        throw FormatError("truncated header in " + path.string());

    VectorSet vs;
    vs.count = count;
    vs.dim = dim;
    vs.data.resize(static_cast<std::size_t>(count) * dim);
    for (double& out : vs.data) {
        const std::uint32_t bits = get_u32_le(is);
        if (!is)
            throw FormatError("truncated payload in " + path.string());
        float f;
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f))
            throw NumericError("non-finite value in " + path.string());
        out = static_cast<double>(f);
    }
    // Trailing bytes mean the header lied about the extent.
    is.peek();
    if (!is.eof())
        throw FormatError("payload longer than declared in " + path.string());
    return vs;
}

namespace {

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Mapper {
    double min_x, min_y, scale, offset_x, offset_y;
    double px(double x) const { return offset_x + (x - min_x) * scale; }
    // SVG y grows downward
    double py(double y, double canvas_h) const {
        return canvas_h - (offset_y + (y - min_y) * scale);
    }
};

} // namespace

void render_curve_svg(const VectorSet& data, const Codebook& cb,
                      const std::filesystem::path& path) {
    if (data.dim < 2)
        throw DimensionError("render_curve_svg: need at least 2 dimensions");
    if (cb.dim != data.dim)
        throw DimensionError("render_curve_svg: data/codebook dimension mismatch");
    data.validate();
    cb.validate();

    // Project to 2D along the top PCA directions of the data when needed.
    VectorSet pts2 = data;
    Codebook cb2 = cb;
    if (data.dim > 2) {
        const VectorSet axes = pca_directions(data, 2);
        auto project = [&](const double* src, double* dst) {
            dst[0] = dot(src, axes.row(0), data.dim);
            dst[1] = dot(src, axes.row(1), data.dim);
        };
        pts2 = VectorSet(2, data.count);
        for (std::size_t i = 0; i < data.count; ++i)
            project(data.row(i), pts2.row(i));
        cb2 = Codebook(2, cb.size());
        for (std::size_t i = 0; i < cb.size(); ++i)
            project(cb.word(i), cb2.word(i));
    }

    double min_x = pts2.row(0)[0], max_x = min_x;
    double min_y = pts2.row(0)[1], max_y = min_y;
    auto grow = [&](const double* p) {
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    };
    for (std::size_t i = 0; i < pts2.count; ++i)
        grow(pts2.row(i));
    for (std::size_t i = 0; i < cb2.size(); ++i)
        grow(cb2.word(i));

    const double span_x = std::max(max_x - min_x, 1e-12);
    const double span_y = std::max(max_y - min_y, 1e-12);
    min_x -= 0.05 * span_x;
    max_x += 0.05 * span_x;
    min_y -= 0.05 * span_y;
    max_y += 0.05 * span_y;

    const double canvas = 800.0;
    const double scale = canvas / std::max(max_x - min_x, max_y - min_y);
    Mapper map{min_x, min_y, scale,
               (canvas - (max_x - min_x) * scale) / 2.0,
               (canvas - (max_y - min_y) * scale) / 2.0};

    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
          "viewBox=\"0 0 800 800\">\n"
       << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";

    // data cloud: small gray squares so codewords keep the circle elements
    os << "<g fill=\"#b0b0b0\">\n";
    for (std::size_t i = 0; i < pts2.count; ++i) {
        const double* p = pts2.row(i);
        os << "<rect x=\"" << fmt6(map.px(p[0]) - 1.0) << "\" y=\""
           << fmt6(map.py(p[1], canvas) - 1.0) << "\" width=\"2\" height=\"2\"/>\n";
    }
    os << "</g>\n";

    // curve: stroke interpolates light to dark along segment index
    const std::size_t segs = cb2.segments();
    for (std::size_t k = 0; k < segs; ++k) {
        const double t = segs > 1
            ? static_cast<double>(k) / static_cast<double>(segs - 1)
            : 0.0;
        // light blue to near-black ramp; fractional percentages keep the
        // luminance strictly decreasing even for thousands of segments
        const double r = 82.0 * (1.0 - t) + 3.0 * t;
        const double g = 88.0 * (1.0 - t) + 4.0 * t;
        const double b = 98.0 * (1.0 - t) + 12.0 * t;
        const double* p0 = cb2.word(k);
        const double* p1 = cb2.word(k + 1);
        os << "<line x1=\"" << fmt6(map.px(p0[0])) << "\" y1=\""
           << fmt6(map.py(p0[1], canvas)) << "\" x2=\"" << fmt6(map.px(p1[0]))
           << "\" y2=\"" << fmt6(map.py(p1[1], canvas)) << "\" stroke=\"rgb("
           << fmt6(r) << "%," << fmt6(g) << "%," << fmt6(b)
           << "%)\" stroke-width=\"2\"/>\n";
    }

    // codewords
    os << "<g fill=\"#1f4e9c\">\n";
    for (std::size_t i = 0; i < cb2.size(); ++i) {
        const double* p = cb2.word(i);
        os << "<circle cx=\"" << fmt6(map.px(p[0])) << "\" cy=\""
           << fmt6(map.py(p[1], canvas)) << "\" r=\"3\"/>\n";
    }
    os << "</g>\n</svg>\n";
    if (!os)
        throw IoError("write failed: " + path.string());
}

void render_heatmap_pgm(const std::vector<double>& matrix, std::size_t rows,
                        std::size_t cols, const std::filesystem::path& path) {
    if (rows != cols)
        throw DimensionError("render_heatmap_pgm: matrix must be square");
    if (matrix.size() != rows * cols)
        throw DimensionError("render_heatmap_pgm: matrix extent mismatch");
    double max_v = 0.0;
    for (double v : matrix) {
        if (!std::isfinite(v))
            throw NumericError("render_heatmap_pgm: non-finite entry");
        max_v = std::max(max_v, v);
    }

    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());
    os << "P5\n" << cols << ' ' << rows << "\n255\n";
    for (double v : matrix) {
        const double rel = max_v > 0.0 ? v / max_v : 0.0;
        const int pixel = static_cast<int>(std::lround(255.0 * (1.0 - rel)));
        os.put(static_cast<char>(std::clamp(pixel, 0, 255)));
    }
    if (!os)
        throw IoError("write failed: " + path.string());
}

} // namespace sfvq
