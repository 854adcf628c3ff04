#ifndef SFVQ_QUANTIZER_HPP
#define SFVQ_QUANTIZER_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "sfvq/vector_set.hpp"

namespace sfvq {

/// An ORDERED list of codewords. Order is semantic: segment k connects
/// codeword k and codeword k+1 (0-based), and together the segments form a
/// piecewise-linear curve through the data.
struct Codebook {
    std::size_t dim = 0;
    std::vector<double> data; // N * dim, curve order

    Codebook() = default;
    Codebook(std::size_t dim_, std::size_t count)
        : dim(dim_), data(dim_ * count, 0.0) {}

    std::size_t size() const { return dim ? data.size() / dim : 0; }
    std::size_t segments() const { return size() < 2 ? 0 : size() - 1; }
    const double* word(std::size_t i) const { return data.data() + i * dim; }
    double* word(std::size_t i) { return data.data() + i * dim; }

    // log2(N) when N is a power of two, otherwise empty.
    std::optional<int> bits() const;

    void validate() const;
};

VectorSet to_vector_set(const Codebook& cb);
Codebook codebook_from(const VectorSet& vs);

/// A snapshot of the dithered codebook: entry k lies on segment k at
/// interpolation factor lambda[k].
struct DitheredCodebook {
    const Codebook& base;
    std::vector<double> lambdas; // one per segment, each in [0, 1]

    DitheredCodebook(const Codebook& base_, std::vector<double> lambdas_);
    std::size_t entries() const { return lambdas.size(); }
    void entry(std::size_t k, double* out) const;
};

/// Where one sample landed on the curve.
struct SegmentAssignment {
    std::size_t sample = 0;  // row index in the batch
    std::size_t segment = 0; // 0-based: connects codewords segment, segment+1
    double lambda = 0.0;
    std::vector<double> reconstruction;
    double squared_error = 0.0;
};

enum class InitMode { NormSorted, RandomNormal };
enum class QuantizerMode { Sfvq, Vq };

/// Dithering granularity: one fresh lambda vector per batch (default), or an
/// independent lambda vector per sample, for ablation.
enum class LambdaMode { PerBatch, PerSample };

struct TrainConfig {
    int target_bits = 6; // in [2, 12]
    std::size_t batch_size = 64;
    long long batches_per_stage = 100000;
    double base_lr = 1e-3;
    std::vector<long long> halve_points; // empty = 60%/80% of the stage
    std::uint64_t seed = 0;
    InitMode init_mode = InitMode::NormSorted;
    QuantizerMode mode = QuantizerMode::Sfvq;
    std::size_t init_sample_count = 1000; // 0 = use all data
    LambdaMode lambda_mode = LambdaMode::PerBatch;
    long long log_interval = 0; // 0 = no progress log
};

struct StageStats {
    int stage = 0;              // 0-based recursion stage
    std::size_t codewords = 0;  // N during this stage
    double initial_loss = 0.0;  // first batch of the stage
    double final_loss = 0.0;    // mean over the last 100 batches (or fewer)
    double mean_loss = 0.0;     // over the whole stage
};

struct TrainResult {
    Codebook codebook;
    std::vector<StageStats> history;
};

// Mean of norm-sorted groups: draws sample_count rows from data (all rows
// when sample_count is 0 or >= data.count), sorts them by Euclidean norm,
// splits into n contiguous groups (remainder to the first groups) and
// returns the group means in low-to-high-norm order.
Codebook init_norm_sorted(const VectorSet& data, std::size_t n,
                          std::size_t sample_count = 0, std::uint64_t seed = 0);

// i.i.d. standard-normal codewords.
Codebook init_random(std::size_t n, std::size_t dim, std::uint64_t seed);

// Maps every batch row to its closest dithered entry (lowest segment index
// wins ties).
std::vector<SegmentAssignment> assign_dithered(const VectorSet& batch,
                                               const DitheredCodebook& dithered);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grads; // N * dim, same layout as Codebook::data
};

// Training loss and analytic gradients with the assignment held constant:
// loss is the batch mean of ||x - (1-l_j) c_j - l_j c_{j+1}||^2 and each
// sample contributes -2(1-l_j)(x - xhat)/B to c_j and -2 l_j (x - xhat)/B to
// c_{j+1}.
LossGrad sfvq_loss_grad(const VectorSet& batch, const Codebook& cb,
                        std::span<const double> lambdas);

// Per-sample dithering: lambda_rows holds batch.count rows of N-1 factors.
LossGrad sfvq_loss_grad_per_sample(const VectorSet& batch, const Codebook& cb,
                                   const VectorSet& lambda_rows);

// Plain-VQ objective: nearest codeword, gradient -2(x - xhat)/B to the
// selected codeword only.
LossGrad vq_loss_grad(const VectorSet& batch, const Codebook& cb);

// Doubles the codebook: after each codeword i < N-1 insert
// 0.99 c_i + 0.01 c_{i+1}, and before the last codeword insert
// 0.01 c_{N-2} + 0.99 c_{N-1}. Every new point lies on an existing segment,
// so the polyline is unchanged.
Codebook expand(const Codebook& cb);

// Recursive training: start at N=4, run batches_per_stage batches per stage,
// double until N = 2^target_bits. Deterministic per config.
TrainResult train(const TrainConfig& config, const VectorSet& data,
                  std::ostream* log = nullptr);

struct NearestResult {
    std::size_t index = 0;
    std::vector<double> reconstruction;
    double squared_error = 0.0;
};

// Nearest codeword under Euclidean distance; lowest index wins ties.
NearestResult quantize_nearest(std::span<const double> x, const Codebook& cb);

// Closed-form projection onto the polyline: per segment,
// lambda* = clamp(<x - c_j, c_{j+1} - c_j> / ||c_{j+1} - c_j||^2, 0, 1),
// then the segment with the smallest error wins (lowest index on ties).
SegmentAssignment quantize_segment(std::span<const double> x, const Codebook& cb);

// Mean squared quantization error over a dataset.
double mean_distortion_nearest(const VectorSet& data, const Codebook& cb);
double mean_distortion_segment(const VectorSet& data, const Codebook& cb);

InitMode init_mode_from_string(std::string_view name);
QuantizerMode quantizer_mode_from_string(std::string_view name);

} // namespace sfvq

#endif
