// Command-line frontend: datasets -> training -> analysis -> directions ->
// plots. stdout carries machine-parsable key=value lines; prose goes to
// stderr. Exit codes: 0 success, 1 usage error, 2 data/format error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sfvq/analysis.hpp"
#include "sfvq/datasets.hpp"
#include "sfvq/directions.hpp"
#include "sfvq/errors.hpp"
#include "sfvq/io.hpp"
#include "sfvq/ordering.hpp"
#include "sfvq/quantizer.hpp"

namespace {

using namespace sfvq;

struct GenArgs {
    std::string kind;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t dim = 2;
    double noise = 0.05;
    double scale = 1.0;
    double factor = 0.5;
    double turns = 3.0;
    double moons_offset = 4.0;
};

struct TrainArgs {
    std::string data;
    int bits = 6;
    std::string mode = "sfvq";
    std::string init = "norm_sorted";
    std::uint64_t seed = 0;
    long long batches_per_stage = 100000;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::size_t init_samples = 1000;
    bool lambda_per_sample = false;
    long long log_interval = 0;
    std::string out;
};

struct QuantizeArgs {
    std::string data;
    std::string codebook;
    std::string mode = "segment";
    std::string out;
};

struct MetricsArgs {
    std::string data;
    std::string codebook;
    double tau = 3.0;
    double factor = 2.0;
    double percentile = 95.0;
    std::size_t samples_per_segment = 100;
};

struct ReorderArgs {
    std::string codebook;
    std::string heuristic = "nn";
    std::string out;
};

struct DirectionsArgs {
    std::string codebook;
    std::size_t pair = 0;
    std::string label;
    std::string layer_mask;
    std::string out;
};

struct SampleLineArgs {
    std::string codebook;
    std::size_t pair = 0;
    std::size_t k = 20;
    double noise = 0.3;
    std::uint64_t seed = 0;
    std::string out;
};

struct PullbackArgs {
    std::string pairs_src;
    std::string pairs_img;
    std::string codebook;
    std::string out;
};

struct PlotArgs {
    std::string data;
    std::string codebook;
    std::string heatmap;
    std::string out;
};

int run_gen(const GenArgs& a) {
    DistributionParams params;
    params.kind = kind_from_string(a.kind);
    params.gaussian_dim = a.dim;
    params.noise = a.noise;
    params.scale = a.scale;
    params.circles_factor = a.factor;
    params.spiral_turns = a.turns;
    params.moons_offset = a.moons_offset;
    const VectorSet vs = generate(params, a.n, a.seed);
    write_vectors(a.out, vs);
    std::cout << "kind=" << a.kind << "\ncount=" << vs.count
              << "\ndim=" << vs.dim << "\nout=" << a.out << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    const VectorSet data = read_vectors(a.data);
    TrainConfig cfg;
    cfg.target_bits = a.bits;
    cfg.batch_size = a.batch_size;
    cfg.batches_per_stage = a.batches_per_stage;
    cfg.base_lr = a.lr;
    cfg.seed = a.seed;
    cfg.init_mode = init_mode_from_string(a.init);
    cfg.mode = quantizer_mode_from_string(a.mode);
    cfg.init_sample_count = a.init_samples;
    cfg.lambda_mode = a.lambda_per_sample ? LambdaMode::PerSample
                                          : LambdaMode::PerBatch;
    cfg.log_interval = a.log_interval;

    const TrainResult result = train(cfg, data, &std::cerr);
    write_vectors(a.out, to_vector_set(result.codebook));

    std::cout << "codewords=" << result.codebook.size() << "\nstages="
              << result.history.size() << "\nfinal_loss="
              << result.history.back().final_loss << "\nout=" << a.out << "\n";
    return 0;
}

int run_quantize(const QuantizeArgs& a) {
    const VectorSet data = read_vectors(a.data);
    const Codebook cb = codebook_from(read_vectors(a.codebook));

    VectorSet recon(cb.dim, data.count);
    double mse = 0.0;
    if (a.mode == "nearest") {
        for (std::size_t i = 0; i < data.count; ++i) {
            const auto r = quantize_nearest(std::span(data.row(i), data.dim), cb);
            std::copy(r.reconstruction.begin(), r.reconstruction.end(),
                      recon.row(i));
            mse += r.squared_error;
        }
    } else if (a.mode == "segment") {
        for (std::size_t i = 0; i < data.count; ++i) {
            const auto r = quantize_segment(std::span(data.row(i), data.dim), cb);
            std::copy(r.reconstruction.begin(), r.reconstruction.end(),
                      recon.row(i));
            mse += r.squared_error;
        }
    } else {
        throw InvalidArgument("unknown quantize mode: " + a.mode);
    }
    if (data.count == 0)
        throw InvalidArgument("quantize: empty data");
    mse /= static_cast<double>(data.count);

    if (!a.out.empty())
        write_vectors(a.out, recon);
    std::cout << "mode=" << a.mode << "\ncount=" << data.count
              << "\nmean_squared_error=" << mse << "\n";
    return 0;
}

int run_metrics(const MetricsArgs& a) {
    const VectorSet data = read_vectors(a.data);
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    const PathOrder order = order_path(cb, Heuristic::Identity);
    OutlierParams op{a.factor, a.percentile};
    const ArrangementReport report =
        arrangement_report(cb, order, data, a.tau, a.samples_per_segment, op);
    std::cout << report.to_key_value_text();
    std::cout << "codeword_distortion=" << mean_distortion_nearest(data, cb)
              << "\nsegment_distortion=" << mean_distortion_segment(data, cb)
              << "\n";
    return 0;
}

int run_reorder(const ReorderArgs& a) {
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    const PathOrder order = order_path(cb, heuristic_from_string(a.heuristic));
    const Codebook reordered = apply_order(cb, order);
    write_vectors(a.out, to_vector_set(reordered));
    std::cout << "heuristic=" << a.heuristic << "\npath_length="
              << path_length(cb, order) << "\nout=" << a.out << "\n";
    return 0;
}

int run_directions(const DirectionsArgs& a) {
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    DirectionVec d = extract_direction(cb, a.pair);
    d.label = a.label;
    d.layer_mask = a.layer_mask;

    VectorSet vs(d.vector.size(), 1);
    std::copy(d.vector.begin(), d.vector.end(), vs.row(0));
    write_vectors(a.out, vs);

    const std::string meta_path = a.out + ".meta";
    std::ofstream meta(meta_path);
    if (!meta)
        throw IoError("cannot open for writing: " + meta_path);
    meta << "label=" << d.label << "\npair=" << d.pair_lo << ','
         << d.pair_lo + 1 << "\nlayer_mask=" << d.layer_mask << "\nraw_norm="
         << d.raw_norm << "\n";

    std::cout << "pair=" << d.pair_lo << ',' << d.pair_lo + 1 << "\nraw_norm="
              << d.raw_norm << "\nout=" << a.out << "\n";
    return 0;
}

int run_sample_line(const SampleLineArgs& a) {
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    const VectorSet pts = sample_line(cb, a.pair, a.k, a.noise, a.seed);
    write_vectors(a.out, pts);
    std::cout << "pair=" << a.pair << ',' << a.pair + 1 << "\ncount="
              << pts.count << "\nout=" << a.out << "\n";
    return 0;
}

int run_pullback(const PullbackArgs& a) {
    PairedSamples pairs;
    pairs.source = read_vectors(a.pairs_src);
    pairs.image = read_vectors(a.pairs_img);
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    const PullbackResult result = pullback_codebook(pairs, cb);
    write_vectors(a.out, to_vector_set(result.codebook));

    std::size_t filled = 0;
    std::string filled_list;
    for (std::size_t i = 0; i < result.filled_from_neighbor.size(); ++i)
        if (result.filled_from_neighbor[i]) {
            ++filled;
            if (!filled_list.empty())
                filled_list += ',';
            filled_list += std::to_string(i);
        }
    std::cout << "codewords=" << result.codebook.size() << "\nempty_cells="
              << filled << "\nempty_cell_indices=" << filled_list << "\nout="
              << a.out << "\n";
    return 0;
}

int run_plot(const PlotArgs& a) {
    if (!a.heatmap.empty()) {
        const Codebook cb = codebook_from(read_vectors(a.heatmap));
        const auto matrix = heatmap_matrix(cb);
        render_heatmap_pgm(matrix, cb.size(), cb.size(), a.out);
        std::cout << "size=" << cb.size() << "\nout=" << a.out << "\n";
        return 0;
    }
    if (a.data.empty() || a.codebook.empty())
        throw InvalidArgument("plot: need either --heatmap, or --data with "
                              "--codebook");
    const VectorSet data = read_vectors(a.data);
    const Codebook cb = codebook_from(read_vectors(a.codebook));
    render_curve_svg(data, cb, a.out);
    std::cout << "codewords=" << cb.size() << "\nout=" << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-filling vector quantization toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic dataset");
    cmd_gen->add_option("--kind", gen.kind,
                        "pentagon2d|moons3d|circles3d|spiral3d|gaussian")
        ->required();
    cmd_gen->add_option("--n", gen.n, "number of samples")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "random seed")
        ->envname("SFVQ_SEED")
        ->capture_default_str();
    cmd_gen->add_option("--out", gen.out, "output vector file")->required();
    cmd_gen->add_option("--dim", gen.dim, "dimension (gaussian only)")
        ->capture_default_str();
    cmd_gen->add_option("--noise", gen.noise, "jitter std for the 3D shapes")
        ->capture_default_str();
    cmd_gen->add_option("--scale", gen.scale, "output scale factor")
        ->capture_default_str();
    cmd_gen->add_option("--factor", gen.factor,
                        "inner/outer radius ratio (circles3d)")
        ->capture_default_str();
    cmd_gen->add_option("--turns", gen.turns, "revolutions (spiral3d)")
        ->capture_default_str();
    cmd_gen->add_option("--moons-offset", gen.moons_offset,
                        "y offset of the moons from the origin")
        ->capture_default_str();

    TrainArgs tr;
    auto* cmd_train = app.add_subcommand("train", "train a codebook");
    cmd_train->add_option("--data", tr.data, "training vector file")->required();
    cmd_train->add_option("--bits", tr.bits, "target bitrate, 2..12")
        ->capture_default_str();
    cmd_train->add_option("--mode", tr.mode, "sfvq|vq")->capture_default_str();
    cmd_train->add_option("--init", tr.init, "norm_sorted|random_normal")
        ->capture_default_str();
    cmd_train->add_option("--seed", tr.seed, "random seed")
        ->envname("SFVQ_SEED")
        ->capture_default_str();
    cmd_train->add_option("--batches-per-stage", tr.batches_per_stage,
                          "batches per recursion stage")
        ->capture_default_str();
    cmd_train->add_option("--batch-size", tr.batch_size, "batch size")
        ->capture_default_str();
    cmd_train->add_option("--lr", tr.lr, "initial learning rate")
        ->capture_default_str();
    cmd_train->add_option("--init-samples", tr.init_samples,
                          "vectors drawn for norm-sorted init (0 = all)")
        ->capture_default_str();
    cmd_train->add_flag("--lambda-per-sample", tr.lambda_per_sample,
                        "draw dither factors per sample instead of per batch");
    cmd_train->add_option("--log-interval", tr.log_interval,
                          "progress log every k batches to stderr (0 = off)")
        ->capture_default_str();
    cmd_train->add_option("--out", tr.out, "output codebook file")->required();

    QuantizeArgs qa;
    auto* cmd_quant = app.add_subcommand("quantize",
                                         "quantize vectors against a codebook");
    cmd_quant->add_option("--data", qa.data, "input vector file")->required();
    cmd_quant->add_option("--codebook", qa.codebook, "codebook file")->required();
    cmd_quant->add_option("--mode", qa.mode, "nearest|segment")
        ->capture_default_str();
    cmd_quant->add_option("--out", qa.out, "optional reconstruction output");

    MetricsArgs ma;
    auto* cmd_metrics = app.add_subcommand("metrics",
                                           "arrangement and distortion report");
    cmd_metrics->add_option("--data", ma.data, "data vector file")->required();
    cmd_metrics->add_option("--codebook", ma.codebook, "codebook file")->required();
    cmd_metrics->add_option("--tau", ma.tau, "jump threshold multiplier")
        ->capture_default_str();
    cmd_metrics->add_option("--factor", ma.factor, "outlier threshold factor")
        ->capture_default_str();
    cmd_metrics->add_option("--percentile", ma.percentile,
                            "outlier threshold percentile")
        ->capture_default_str();
    cmd_metrics->add_option("--samples-per-segment", ma.samples_per_segment,
                            "probes per segment for inside_fraction")
        ->capture_default_str();

    ReorderArgs ra;
    auto* cmd_reorder = app.add_subcommand("reorder",
                                           "reorder a codebook with a TSP heuristic");
    cmd_reorder->add_option("--codebook", ra.codebook, "codebook file")->required();
    cmd_reorder->add_option("--heuristic", ra.heuristic,
                            "nn|greedy|christofides|identity")
        ->capture_default_str();
    cmd_reorder->add_option("--out", ra.out, "output codebook file")->required();

    DirectionsArgs da;
    auto* cmd_dirs = app.add_subcommand("directions",
                                        "extract a direction from adjacent codewords");
    cmd_dirs->add_option("--codebook", da.codebook, "codebook file")->required();
    cmd_dirs->add_option("--pair", da.pair,
                         "0-based index i of the codeword pair (i, i+1)")
        ->required();
    cmd_dirs->add_option("--label", da.label, "free-form direction label");
    cmd_dirs->add_option("--layer-mask", da.layer_mask,
                         "opaque layer annotation, e.g. W3-W8");
    cmd_dirs->add_option("--out", da.out, "output direction file")->required();

    SampleLineArgs sa;
    auto* cmd_line = app.add_subcommand("sample-line",
                                        "sample points along one curve segment");
    cmd_line->add_option("--codebook", sa.codebook, "codebook file")->required();
    cmd_line->add_option("--pair", sa.pair,
                         "0-based index i of the codeword pair (i, i+1)")
        ->required();
    cmd_line->add_option("--k", sa.k, "number of points")->capture_default_str();
    cmd_line->add_option("--noise", sa.noise, "Gaussian noise std")
        ->capture_default_str();
    cmd_line->add_option("--seed", sa.seed, "random seed")
        ->envname("SFVQ_SEED")
        ->capture_default_str();
    cmd_line->add_option("--out", sa.out, "output vector file")->required();

    PullbackArgs pa;
    auto* cmd_pull = app.add_subcommand("pullback",
                                        "map a codebook back to a source space");
    cmd_pull->add_option("--pairs-src", pa.pairs_src, "source-space vectors")
        ->required();
    cmd_pull->add_option("--pairs-img", pa.pairs_img, "image-space vectors")
        ->required();
    cmd_pull->add_option("--codebook", pa.codebook, "image-space codebook")
        ->required();
    cmd_pull->add_option("--out", pa.out, "output source-space codebook")
        ->required();

    PlotArgs pl;
    auto* cmd_plot = app.add_subcommand("plot", "render a curve SVG or heatmap PGM");
    cmd_plot->add_option("--data", pl.data, "data vector file (curve plot)");
    cmd_plot->add_option("--codebook", pl.codebook, "codebook file (curve plot)");
    cmd_plot->add_option("--heatmap", pl.heatmap,
                         "codebook file to render as a distance heatmap");
    cmd_plot->add_option("--out", pl.out, "output file (.svg or .pgm)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 1;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_train->parsed()) return run_train(tr);
        if (cmd_quant->parsed()) return run_quantize(qa);
        if (cmd_metrics->parsed()) return run_metrics(ma);
        if (cmd_reorder->parsed()) return run_reorder(ra);
        if (cmd_dirs->parsed()) return run_directions(da);
        if (cmd_line->parsed()) return run_sample_line(sa);
        if (cmd_pull->parsed()) return run_pullback(pa);
        if (cmd_plot->parsed()) return run_plot(pl);
        std::cerr << "no subcommand given\n" << app.help() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
