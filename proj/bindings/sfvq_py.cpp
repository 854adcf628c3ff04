#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sfvq/analysis.hpp"
#include "sfvq/datasets.hpp"
#include "sfvq/directions.hpp"
#include "sfvq/errors.hpp"
#include "sfvq/io.hpp"
#include "sfvq/ordering.hpp"
#include "sfvq/quantizer.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

sfvq::VectorSet vectors_from(const DoubleArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2)
        throw sfvq::DimensionError("expected a 2D array of shape (count, dim)");
    sfvq::VectorSet vs;
    vs.count = static_cast<std::size_t>(buf.shape[0]);
    vs.dim = static_cast<std::size_t>(buf.shape[1]);
    const double* p = static_cast<const double*>(buf.ptr);
    vs.data.assign(p, p + vs.count * vs.dim);
    return vs;
}

sfvq::Codebook codebook_from_array(const DoubleArray& arr) {
    return sfvq::codebook_from(vectors_from(arr));
}

py::array_t<double> array_from(const sfvq::VectorSet& vs) {
    py::array_t<double> arr({vs.count, vs.dim});
    std::copy(vs.data.begin(), vs.data.end(), arr.mutable_data());
    return arr;
}

py::array_t<double> array_1d(const std::vector<double>& v) {
    py::array_t<double> arr(
        std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), arr.mutable_data());
    return arr;
}

py::array_t<double> array_from(const sfvq::Codebook& cb) {
    return array_from(sfvq::to_vector_set(cb));
}

std::vector<double> vec_from_1d(const DoubleArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 1)
        throw sfvq::DimensionError("expected a 1D array");
    const double* p = static_cast<const double*>(buf.ptr);
    return std::vector<double>(p, p + buf.shape[0]);
}

sfvq::DirectionVec direction_from(const DoubleArray& arr) {
    sfvq::DirectionVec d;
    d.vector = vec_from_1d(arr);
    d.raw_norm = sfvq::norm(d.vector.data(), d.vector.size());
    return d;
}

sfvq::PathOrder order_from(const std::vector<std::size_t>& perm) {
    return sfvq::PathOrder{perm, sfvq::Heuristic::Identity};
}

} // namespace

PYBIND11_MODULE(_sfvq, m) {
    m.doc() = "Space-filling vector quantization: codebook training on a "
              "piecewise-linear curve, ordering heuristics, arrangement "
              "metrics, and direction extraction.";

    py::register_exception<sfvq::Error>(m, "SfvqError", PyExc_ValueError);

    m.def(
        "generate",
        [](const std::string& kind, std::size_t n, std::uint64_t seed,
           std::size_t dim, double noise, double scale, double factor,
           double turns, double moons_offset) {
            sfvq::DistributionParams params;
            params.kind = sfvq::kind_from_string(kind);
            params.gaussian_dim = dim;
            params.noise = noise;
            params.scale = scale;
            params.circles_factor = factor;
            params.spiral_turns = turns;
            params.moons_offset = moons_offset;
            return array_from(sfvq::generate(params, n, seed));
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("dim") = 2,
        py::arg("noise") = 0.05, py::arg("scale") = 1.0, py::arg("factor") = 0.5,
        py::arg("turns") = 3.0, py::arg("moons_offset") = 4.0,
        "Draw n samples from a synthetic distribution "
        "(pentagon2d|moons3d|circles3d|spiral3d|gaussian).");

    m.def(
        "hilbert_corners",
        [](int order) { return array_from(sfvq::hilbert_corners(order)); },
        py::arg("order"),
        "Corner points of the order-r Hilbert curve in curve order.");

    m.def(
        "train",
        [](const DoubleArray& data, int bits, std::size_t batch_size,
           long long batches_per_stage, double lr, std::uint64_t seed,
           const std::string& init, const std::string& mode,
           std::size_t init_samples, bool lambda_per_sample) {
            sfvq::TrainConfig cfg;
            cfg.target_bits = bits;
            cfg.batch_size = batch_size;
            cfg.batches_per_stage = batches_per_stage;
            cfg.base_lr = lr;
            cfg.seed = seed;
            cfg.init_mode = sfvq::init_mode_from_string(init);
            cfg.mode = sfvq::quantizer_mode_from_string(mode);
            cfg.init_sample_count = init_samples;
            cfg.lambda_mode = lambda_per_sample ? sfvq::LambdaMode::PerSample
                                                : sfvq::LambdaMode::PerBatch;
            sfvq::TrainResult result;
            {
                py::gil_scoped_release release;
                result = sfvq::train(cfg, vectors_from(data));
            }
            py::list history;
            for (const auto& s : result.history) {
                py::dict d;
                d["stage"] = s.stage;
                d["codewords"] = s.codewords;
                d["initial_loss"] = s.initial_loss;
                d["final_loss"] = s.final_loss;
                d["mean_loss"] = s.mean_loss;
                history.append(d);
            }
            return py::make_tuple(array_from(result.codebook), history);
        },
        py::arg("data"), py::arg("bits") = 6, py::arg("batch_size") = 64,
        py::arg("batches_per_stage") = 100000, py::arg("lr") = 1e-3,
        py::arg("seed") = 0, py::arg("init") = "norm_sorted",
        py::arg("mode") = "sfvq", py::arg("init_samples") = 1000,
        py::arg("lambda_per_sample") = false,
        "Recursive codebook training; returns (codebook, stage history).");

    m.def(
        "init_norm_sorted",
        [](const DoubleArray& data, std::size_t n, std::size_t sample_count,
           std::uint64_t seed) {
            return array_from(
                sfvq::init_norm_sorted(vectors_from(data), n, sample_count, seed));
        },
        py::arg("data"), py::arg("n"), py::arg("sample_count") = 0,
        py::arg("seed") = 0);

    m.def(
        "init_random",
        [](std::size_t n, std::size_t dim, std::uint64_t seed) {
            return array_from(sfvq::init_random(n, dim, seed));
        },
        py::arg("n"), py::arg("dim"), py::arg("seed"));

    m.def(
        "expand",
        [](const DoubleArray& cb) {
            return array_from(sfvq::expand(codebook_from_array(cb)));
        },
        py::arg("codebook"), "Double the codebook without moving the polyline.");

    m.def(
        "quantize_nearest",
        [](const DoubleArray& x, const DoubleArray& cb) {
            const auto v = vec_from_1d(x);
            const auto r = sfvq::quantize_nearest(v, codebook_from_array(cb));
            return py::make_tuple(r.index, array_1d(r.reconstruction),
                                  r.squared_error);
        },
        py::arg("x"), py::arg("codebook"),
        "Nearest codeword: (index, reconstruction, squared_error).");

    m.def(
        "quantize_segment",
        [](const DoubleArray& x, const DoubleArray& cb) {
            const auto v = vec_from_1d(x);
            const auto r = sfvq::quantize_segment(v, codebook_from_array(cb));
            return py::make_tuple(r.segment, r.lambda,
                                  array_1d(r.reconstruction), r.squared_error);
        },
        py::arg("x"), py::arg("codebook"),
        "Closed-form curve projection: (segment, lambda, reconstruction, "
        "squared_error).");

    m.def(
        "order_path",
        [](const DoubleArray& cb, const std::string& heuristic) {
            return sfvq::order_path(codebook_from_array(cb),
                                    sfvq::heuristic_from_string(heuristic))
                .permutation;
        },
        py::arg("codebook"), py::arg("heuristic") = "nn");

    m.def(
        "path_length",
        [](const DoubleArray& cb, const std::vector<std::size_t>& perm) {
            return sfvq::path_length(codebook_from_array(cb), order_from(perm));
        },
        py::arg("codebook"), py::arg("permutation"));

    m.def(
        "adjacency_ratio",
        [](const DoubleArray& cb, const std::vector<std::size_t>& perm) {
            return sfvq::adjacency_ratio(codebook_from_array(cb), order_from(perm));
        },
        py::arg("codebook"), py::arg("permutation"));

    m.def(
        "jump_count",
        [](const DoubleArray& cb, const std::vector<std::size_t>& perm,
           double tau) {
            return sfvq::jump_count(codebook_from_array(cb), order_from(perm), tau);
        },
        py::arg("codebook"), py::arg("permutation"), py::arg("tau") = 3.0);

    m.def(
        "outlier_count",
        [](const DoubleArray& cb, const DoubleArray& data, double factor,
           double percentile) {
            return sfvq::outlier_count(codebook_from_array(cb), vectors_from(data),
                                       sfvq::OutlierParams{factor, percentile});
        },
        py::arg("codebook"), py::arg("data"), py::arg("factor") = 2.0,
        py::arg("percentile") = 95.0);

    m.def(
        "inside_fraction",
        [](const DoubleArray& cb, const DoubleArray& data,
           std::size_t samples_per_segment, double factor, double percentile) {
            return sfvq::inside_fraction(codebook_from_array(cb),
                                         vectors_from(data), samples_per_segment,
                                         sfvq::OutlierParams{factor, percentile});
        },
        py::arg("codebook"), py::arg("data"), py::arg("samples_per_segment") = 100,
        py::arg("factor") = 2.0, py::arg("percentile") = 95.0);

    m.def(
        "heatmap_matrix",
        [](const DoubleArray& cb) {
            const auto codebook = codebook_from_array(cb);
            const auto values = sfvq::heatmap_matrix(codebook);
            const std::size_t n = codebook.size();
            py::array_t<double> arr({n, n});
            std::copy(values.begin(), values.end(), arr.mutable_data());
            return arr;
        },
        py::arg("codebook"));

    m.def(
        "pairwise_stats",
        [](const DoubleArray& data, std::size_t subsample, std::uint64_t seed) {
            const auto st = sfvq::pairwise_stats(vectors_from(data), subsample, seed);
            return py::make_tuple(st.mean_dist, st.var_dist, st.eigen_sum);
        },
        py::arg("data"), py::arg("subsample") = 2000, py::arg("seed") = 0,
        "Returns (mean_dist, var_dist, eigen_sum).");

    m.def(
        "pca_directions",
        [](const DoubleArray& data, std::size_t k, std::uint64_t seed) {
            return array_from(sfvq::pca_directions(vectors_from(data), k, seed));
        },
        py::arg("data"), py::arg("k"), py::arg("seed") = 0);

    m.def(
        "correlation_profile",
        [](const std::vector<long long>& steps,
           const std::vector<std::vector<double>>& scores,
           std::vector<std::string> names) {
            const auto prof = sfvq::correlation_profile(steps, scores,
                                                        std::move(names));
            return py::make_tuple(array_1d(prof.weights), prof.names);
        },
        py::arg("step_indices"), py::arg("scores"),
        py::arg("names") = std::vector<std::string>{},
        "Returns (L1-normalized |Pearson| weights, attribute names).");

    m.def(
        "extract_direction",
        [](const DoubleArray& cb, std::size_t i) {
            const auto d = sfvq::extract_direction(codebook_from_array(cb), i);
            return py::make_tuple(array_1d(d.vector), d.raw_norm);
        },
        py::arg("codebook"), py::arg("pair"),
        "Unit direction from codewords (pair, pair+1): (vector, raw_norm).");

    m.def(
        "angle_deg",
        [](const DoubleArray& d1, const DoubleArray& d2) {
            return sfvq::angle_deg(direction_from(d1), direction_from(d2));
        },
        py::arg("d1"), py::arg("d2"));

    m.def(
        "apply_shift",
        [](const DoubleArray& w, const DoubleArray& d, double sigma) {
            const auto wv = vec_from_1d(w);
            return array_1d(sfvq::apply_shift(wv, direction_from(d), sigma));
        },
        py::arg("w"), py::arg("direction"), py::arg("sigma"));

    m.def(
        "sample_line",
        [](const DoubleArray& cb, std::size_t i, std::size_t k, double noise,
           std::uint64_t seed) {
            return array_from(
                sfvq::sample_line(codebook_from_array(cb), i, k, noise, seed));
        },
        py::arg("codebook"), py::arg("pair"), py::arg("k") = 20,
        py::arg("noise") = 0.3, py::arg("seed") = 0);

    m.def(
        "pullback_codebook",
        [](const DoubleArray& source, const DoubleArray& image,
           const DoubleArray& cb) {
            sfvq::PairedSamples pairs;
            pairs.source = vectors_from(source);
            pairs.image = vectors_from(image);
            const auto r = sfvq::pullback_codebook(pairs, codebook_from_array(cb));
            return py::make_tuple(array_from(r.codebook), r.filled_from_neighbor);
        },
        py::arg("source"), py::arg("image"), py::arg("codebook"),
        "Returns (source-space codebook, filled_from_neighbor flags).");

    m.def(
        "write_vectors",
        [](const std::string& path, const DoubleArray& data) {
            sfvq::write_vectors(path, vectors_from(data));
        },
        py::arg("path"), py::arg("data"));

    m.def(
        "read_vectors",
        [](const std::string& path) { return array_from(sfvq::read_vectors(path)); },
        py::arg("path"));

    m.def(
        "render_curve_svg",
        [](const DoubleArray& data, const DoubleArray& cb, const std::string& path) {
            sfvq::render_curve_svg(vectors_from(data), codebook_from_array(cb),
                                   path);
        },
        py::arg("data"), py::arg("codebook"), py::arg("path"));

    m.def(
        "render_heatmap_pgm",
        [](const DoubleArray& matrix, const std::string& path) {
            const auto buf = matrix.request();
            if (buf.ndim != 2)
                throw sfvq::DimensionError("expected a 2D matrix");
            const double* p = static_cast<const double*>(buf.ptr);
            std::vector<double> values(p, p + buf.shape[0] * buf.shape[1]);
            sfvq::render_heatmap_pgm(values,
                                     static_cast<std::size_t>(buf.shape[0]),
                                     static_cast<std::size_t>(buf.shape[1]), path);
        },
        py::arg("matrix"), py::arg("path"));

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
