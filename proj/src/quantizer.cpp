#include "sfvq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "sfvq/errors.hpp"
#include "sfvq/optim.hpp"

namespace sfvq {

std::optional<int> Codebook::bits() const {
    const std::size_t n = size();
    if (n < 2 || (n & (n - 1)) != 0)
        return std::nullopt;
    int b = 0;
    for (std::size_t v = n; v > 1; v >>= 1)
        ++b;
    return b;
}

void Codebook::validate() const {
    if (dim == 0)
        throw DimensionError("Codebook: dimension must be positive");
    if (data.size() % dim != 0)
        throw DimensionError("Codebook: data extent is not a multiple of dim");
    if (size() < 2)
        throw InvalidArgument("Codebook: needs at least 2 codewords");
    for (double v : data)
        if (!std::isfinite(v))
            throw NumericError("Codebook contains a non-finite value");
}

VectorSet to_vector_set(const Codebook& cb) {
    VectorSet vs;
    vs.dim = cb.dim;
    vs.count = cb.size();
    vs.data = cb.data;
    return vs;
}

Codebook codebook_from(const VectorSet& vs) {
    Codebook cb;
    cb.dim = vs.dim;
    cb.data = vs.data;
    cb.validate();
    return cb;
}

DitheredCodebook::DitheredCodebook(const Codebook& base_,
                                   std::vector<double> lambdas_)
    : base(base_), lambdas(std::move(lambdas_)) {
    if (base.size() < 2)
        throw InvalidArgument("DitheredCodebook: base needs at least 2 codewords");
    if (lambdas.size() != base.segments())
        throw DimensionError("DitheredCodebook: need exactly N-1 lambdas, got " +
                             std::to_string(lambdas.size()));
    for (double l : lambdas)
        if (!(l >= 0.0 && l <= 1.0))
            throw InvalidArgument("DitheredCodebook: lambdas must lie in [0, 1]");
}

void DitheredCodebook::entry(std::size_t k, double* out) const {
    const double l = lambdas[k];
    const double* a = base.word(k);
    const double* b = base.word(k + 1);
    for (std::size_t d = 0; d < base.dim; ++d)
        out[d] = (1.0 - l) * a[d] + l * b[d];
}

namespace {

// Nearest dithered entry for one sample; rows of `entries` are the
// precomputed dithered codewords.
std::size_t nearest_row(const double* x, const std::vector<double>& entries,
                        std::size_t rows, std::size_t dim, double& best_sq) {
    std::size_t best = 0;
    best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rows; ++k) {
        const double sq = squared_distance(x, entries.data() + k * dim, dim);
        if (sq < best_sq) {
            best_sq = sq;
            best = k;
        }
    }
    return best;
}

std::vector<double> materialize_entries(const Codebook& cb,
                                        std::span<const double> lambdas) {
    const std::size_t segs = cb.segments();
    std::vector<double> entries(segs * cb.dim);
    for (std::size_t k = 0; k < segs; ++k) {
        const double l = lambdas[k];
        const double* a = cb.word(k);
        const double* b = cb.word(k + 1);
        for (std::size_t d = 0; d < cb.dim; ++d)
            entries[k * cb.dim + d] = (1.0 - l) * a[d] + l * b[d];
    }
    return entries;
}

void check_batch(const VectorSet& batch, const Codebook& cb) {
    if (batch.dim != cb.dim)
        throw DimensionError("batch dimension " + std::to_string(batch.dim) +
                             " does not match codebook dimension " +
                             std::to_string(cb.dim));
    if (cb.size() < 2)
        throw InvalidArgument("codebook needs at least 2 codewords");
}

// Shared gradient accumulation for the dithered objective. Adds one sample's
// contribution for segment j with factor l.
void accumulate_sfvq(const double* x, const double* xhat, std::size_t dim,
                     std::size_t j, double l, double inv_batch,
                     std::vector<double>& grads) {
    double* gj = grads.data() + j * dim;
    double* gj1 = grads.data() + (j + 1) * dim;
    for (std::size_t d = 0; d < dim; ++d) {
        const double r = x[d] - xhat[d];
        gj[d] += -2.0 * (1.0 - l) * r * inv_batch;
        gj1[d] += -2.0 * l * r * inv_batch;
    }
}

} // namespace

std::vector<SegmentAssignment> assign_dithered(const VectorSet& batch,
                                               const DitheredCodebook& dithered) {
    check_batch(batch, dithered.base);
    const std::size_t dim = batch.dim;
    const auto entries = materialize_entries(dithered.base, dithered.lambdas);
    const std::size_t segs = dithered.entries();

    std::vector<SegmentAssignment> out(batch.count);
    for (std::size_t i = 0; i < batch.count; ++i) {
        double sq = 0.0;
        const std::size_t j = nearest_row(batch.row(i), entries, segs, dim, sq);
        SegmentAssignment& a = out[i];
        a.sample = i;
        a.segment = j;
        a.lambda = dithered.lambdas[j];
        a.reconstruction.assign(entries.begin() + j * dim,
                                entries.begin() + (j + 1) * dim);
        a.squared_error = sq;
    }
    return out;
}

LossGrad sfvq_loss_grad(const VectorSet& batch, const Codebook& cb,
                        std::span<const double> lambdas) {
    check_batch(batch, cb);
    if (lambdas.size() != cb.segments())
        throw DimensionError("sfvq_loss_grad: need exactly N-1 lambdas");
    if (batch.count == 0)
        throw InvalidArgument("sfvq_loss_grad: empty batch");

    const std::size_t dim = batch.dim;
    const auto entries = materialize_entries(cb, lambdas);
    const double inv_batch = 1.0 / static_cast<double>(batch.count);

    LossGrad lg;
    lg.grads.assign(cb.data.size(), 0.0);
    for (std::size_t i = 0; i < batch.count; ++i) {
        const double* x = batch.row(i);
        double sq = 0.0;
        const std::size_t j = nearest_row(x, entries, cb.segments(), dim, sq);
        lg.loss += sq * inv_batch;
        accumulate_sfvq(x, entries.data() + j * dim, dim, j, lambdas[j],
                        inv_batch, lg.grads);
    }
    return lg;
}

LossGrad sfvq_loss_grad_per_sample(const VectorSet& batch, const Codebook& cb,
                                   const VectorSet& lambda_rows) {
    check_batch(batch, cb);
    if (lambda_rows.count != batch.count || lambda_rows.dim != cb.segments())
        throw DimensionError("sfvq_loss_grad_per_sample: lambda rows must be "
                             "batch.count x (N-1)");
    if (batch.count == 0)
        throw InvalidArgument("sfvq_loss_grad_per_sample: empty batch");

    const std::size_t dim = batch.dim;
    const std::size_t segs = cb.segments();
    const double inv_batch = 1.0 / static_cast<double>(batch.count);

    LossGrad lg;
    lg.grads.assign(cb.data.size(), 0.0);
    std::vector<double> xhat(dim);
    for (std::size_t i = 0; i < batch.count; ++i) {
        const double* x = batch.row(i);
        const double* ls = lambda_rows.row(i);
        std::size_t best = 0;
        double best_sq = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < segs; ++k) {
            const double l = ls[k];
            const double* a = cb.word(k);
            const double* b = cb.word(k + 1);
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double e = x[d] - ((1.0 - l) * a[d] + l * b[d]);
                sq += e * e;
            }
            if (sq < best_sq) {
                best_sq = sq;
                best = k;
            }
        }
        const double l = ls[best];
        const double* a = cb.word(best);
        const double* b = cb.word(best + 1);
        for (std::size_t d = 0; d < dim; ++d)
            xhat[d] = (1.0 - l) * a[d] + l * b[d];
        lg.loss += best_sq * inv_batch;
        accumulate_sfvq(x, xhat.data(), dim, best, l, inv_batch, lg.grads);
    }
    return lg;
}

LossGrad vq_loss_grad(const VectorSet& batch, const Codebook& cb) {
    check_batch(batch, cb);
    if (batch.count == 0)
        throw InvalidArgument("vq_loss_grad: empty batch");

    const std::size_t dim = batch.dim;
    const std::size_t n = cb.size();
    const double inv_batch = 1.0 / static_cast<double>(batch.count);

    LossGrad lg;
    lg.grads.assign(cb.data.size(), 0.0);
    for (std::size_t i = 0; i < batch.count; ++i) {
        const double* x = batch.row(i);
        std::size_t best = 0;
        double best_sq = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double sq = squared_distance(x, cb.word(k), dim);
            if (sq < best_sq) {
                best_sq = sq;
                best = k;
            }
        }
        lg.loss += best_sq * inv_batch;
        const double* c = cb.word(best);
        double* g = lg.grads.data() + best * dim;
        for (std::size_t d = 0; d < dim; ++d)
            g[d] += -2.0 * (x[d] - c[d]) * inv_batch;
    }
    return lg;
}

Codebook init_norm_sorted(const VectorSet& data, std::size_t n,
                          std::size_t sample_count, std::uint64_t seed) {
    if (n < 2)
        throw InvalidArgument("init_norm_sorted: need at least 2 codewords");
    if (data.count < n)
        throw InvalidArgument("init_norm_sorted: " + std::to_string(data.count) +
                              " rows cannot seed " + std::to_string(n) +
                              " codewords");

    // Row indices under consideration: everything, or a seeded subsample
    // without replacement.
    std::vector<std::size_t> rows(data.count);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (sample_count != 0 && sample_count < data.count && sample_count >= n) {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> picked;
        picked.reserve(sample_count);
        std::sample(rows.begin(), rows.end(), std::back_inserter(picked),
                    sample_count, rng);
        rows = std::move(picked);
    }

    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return norm(data.row(a), data.dim) < norm(data.row(b), data.dim);
    });

    const std::size_t m = rows.size();
    const std::size_t base = m / n;
    const std::size_t rem = m % n;

    Codebook cb(data.dim, n);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < n; ++g) {
        const std::size_t group_size = base + (g < rem ? 1 : 0);
        double* w = cb.word(g);
        for (std::size_t s = 0; s < group_size; ++s, ++pos) {
            const double* r = data.row(rows[pos]);
            for (std::size_t d = 0; d < data.dim; ++d)
                w[d] += r[d];
        }
        for (std::size_t d = 0; d < data.dim; ++d)
            w[d] /= static_cast<double>(group_size);
    }
    return cb;
}

Codebook init_random(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n < 2)
        throw InvalidArgument("init_random: need at least 2 codewords");
    if (dim == 0)
        throw InvalidArgument("init_random: dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Codebook cb(dim, n);
    for (double& v : cb.data)
        v = gauss(rng);
    return cb;
}

Codebook expand(const Codebook& cb) {
    const std::size_t n = cb.size();
    if (n < 2)
        throw InvalidArgument("expand: need at least 2 codewords");
    const std::size_t dim = cb.dim;

    Codebook out(dim, 2 * n);
    std::size_t pos = 0;
    auto put = [&](const double* v) {
        std::copy(v, v + dim, out.word(pos));
        ++pos;
    };
    std::vector<double> mix(dim);
    auto put_mix = [&](const double* a, const double* b, double t) {
        for (std::size_t d = 0; d < dim; ++d)
            mix[d] = (1.0 - t) * a[d] + t * b[d];
        put(mix.data());
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        put(cb.word(i));
        put_mix(cb.word(i), cb.word(i + 1), 0.01);
    }
    // One extra point is needed to reach 2N; it sits near the end of the
    // last segment so curve order stays monotone.
    put_mix(cb.word(n - 2), cb.word(n - 1), 0.99);
    put(cb.word(n - 1));
    return out;
}

NearestResult quantize_nearest(std::span<const double> x, const Codebook& cb) {
    if (x.size() != cb.dim)
        throw DimensionError("quantize_nearest: input dimension mismatch");
    NearestResult r;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cb.size(); ++k) {
        const double sq = squared_distance(x.data(), cb.word(k), cb.dim);
        if (sq < best_sq) {
            best_sq = sq;
            r.index = k;
        }
    }
    r.squared_error = best_sq;
    r.reconstruction.assign(cb.word(r.index), cb.word(r.index) + cb.dim);
    return r;
}

SegmentAssignment quantize_segment(std::span<const double> x, const Codebook& cb) {
    if (x.size() != cb.dim)
        throw DimensionError("quantize_segment: input dimension mismatch");
    if (cb.size() < 2)
        throw InvalidArgument("quantize_segment: codebook needs at least 2 codewords");

    const std::size_t dim = cb.dim;
    SegmentAssignment best;
    best.squared_error = std::numeric_limits<double>::infinity();
    std::vector<double> proj(dim);
    for (std::size_t j = 0; j + 1 < cb.size(); ++j) {
        const double* a = cb.word(j);
        const double* b = cb.word(j + 1);
        double seg_sq = 0.0;
        double t = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double e = b[d] - a[d];
            seg_sq += e * e;
            t += (x[d] - a[d]) * e;
        }
        double lambda = 0.0;
        if (seg_sq > 0.0)
            lambda = std::clamp(t / seg_sq, 0.0, 1.0);
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            proj[d] = (1.0 - lambda) * a[d] + lambda * b[d];
            const double e = x[d] - proj[d];
            sq += e * e;
        }
        if (sq < best.squared_error) {
            best.segment = j;
            best.lambda = lambda;
            best.reconstruction = proj;
            best.squared_error = sq;
        }
    }
    return best;
}

double mean_distortion_nearest(const VectorSet& data, const Codebook& cb) {
    if (data.dim != cb.dim)
        throw DimensionError("mean_distortion_nearest: dimension mismatch");
    if (data.count == 0)
        throw InvalidArgument("mean_distortion_nearest: empty data");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.count; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cb.size(); ++k)
            best = std::min(best, squared_distance(data.row(i), cb.word(k), cb.dim));
        acc += best;
    }
    return acc / static_cast<double>(data.count);
}

double mean_distortion_segment(const VectorSet& data, const Codebook& cb) {
    if (data.dim != cb.dim)
        throw DimensionError("mean_distortion_segment: dimension mismatch");
    if (data.count == 0)
        throw InvalidArgument("mean_distortion_segment: empty data");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.count; ++i)
        acc += quantize_segment(std::span(data.row(i), data.dim), cb).squared_error;
    return acc / static_cast<double>(data.count);
}

namespace {

void validate_config(const TrainConfig& c, const VectorSet& data) {
    if (data.count == 0)
        throw InvalidArgument("train: empty data");
    if (c.target_bits < 2 || c.target_bits > 12)
        throw InvalidArgument("train: target_bits must be in [2, 12]");
    if (c.batch_size == 0 || c.batches_per_stage <= 0)
        throw InvalidArgument("train: batch size and batches per stage must be positive");
    if (data.count < c.batch_size)
        throw InvalidArgument("train: data has fewer rows than one batch");
    if (c.base_lr <= 0.0)
        throw InvalidArgument("train: learning rate must be positive");
}

} // namespace

TrainResult train(const TrainConfig& config, const VectorSet& data,
                  std::ostream* log) {
    validate_config(config, data);
    data.validate();

    std::mt19937_64 rng(config.seed);

    Codebook cb;
    if (config.init_mode == InitMode::NormSorted) {
        cb = init_norm_sorted(data, 4, config.init_sample_count, rng());
    } else {
        cb = init_random(4, data.dim, rng());
    }

    LrSchedule schedule = config.halve_points.empty()
        ? default_schedule(config.base_lr, config.batches_per_stage)
        : LrSchedule{config.base_lr, config.batches_per_stage, config.halve_points};

    const std::size_t target_n = std::size_t{1} << config.target_bits;
    std::uniform_int_distribution<std::size_t> pick_row(0, data.count - 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    TrainResult result;
    VectorSet batch(data.dim, config.batch_size);
    int stage = 0;
    for (;; ++stage) {
        AdamState adam = make_adam_state(cb.data.size());
        StageStats stats;
        stats.stage = stage;
        stats.codewords = cb.size();

        const long long tail_window =
            std::min<long long>(100, config.batches_per_stage);
        double tail_sum = 0.0;
        std::vector<double> lambdas(cb.segments());
        VectorSet lambda_rows(cb.segments(), config.batch_size);

        for (long long b = 0; b < config.batches_per_stage; ++b) {
            for (std::size_t i = 0; i < config.batch_size; ++i) {
                const double* src = data.row(pick_row(rng));
                std::copy(src, src + data.dim, batch.row(i));
            }

            LossGrad lg;
            if (config.mode == QuantizerMode::Vq) {
                lg = vq_loss_grad(batch, cb);
            } else if (config.lambda_mode == LambdaMode::PerBatch) {
                for (double& l : lambdas)
                    l = u01(rng);
                lg = sfvq_loss_grad(batch, cb, lambdas);
            } else {
                for (double& l : lambda_rows.data)
                    l = u01(rng);
                lg = sfvq_loss_grad_per_sample(batch, cb, lambda_rows);
            }

            const double lr = lr_at(schedule, b);
            adam_step(adam, std::span(cb.data), std::span(lg.grads), lr);

            if (b == 0)
                stats.initial_loss = lg.loss;
            stats.mean_loss += lg.loss;
            if (b >= config.batches_per_stage - tail_window)
                tail_sum += lg.loss;
            if (log && config.log_interval > 0 && b % config.log_interval == 0)
                (*log) << b << '\t' << lg.loss << '\t' << lr << '\n';
        }

        stats.mean_loss /= static_cast<double>(config.batches_per_stage);
        stats.final_loss = tail_sum / static_cast<double>(tail_window);
        result.history.push_back(stats);

        if (cb.size() >= target_n)
            break;
        cb = expand(cb);
    }

    result.codebook = std::move(cb);
    return result;
}

InitMode init_mode_from_string(std::string_view name) {
    if (name == "norm_sorted") return InitMode::NormSorted;
    if (name == "random_normal") return InitMode::RandomNormal;
    throw InvalidArgument("unknown init mode: " + std::string(name));
}

QuantizerMode quantizer_mode_from_string(std::string_view name) {
    if (name == "sfvq") return QuantizerMode::Sfvq;
    if (name == "vq") return QuantizerMode::Vq;
    throw InvalidArgument("unknown quantizer mode: " + std::string(name));
}

} // namespace sfvq
