#ifndef SFVQ_ANALYSIS_HPP
#define SFVQ_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sfvq/ordering.hpp"
#include "sfvq/quantizer.hpp"
#include "sfvq/vector_set.hpp"

namespace sfvq {

/// Arrangement quality of an ordered codebook against a dataset.
struct ArrangementReport {
    double adjacency_ratio = 0.0;
    std::size_t jump_count = 0;
    std::size_t outlier_count = 0;
    double inside_fraction = 0.0;
    double total_path_length = 0.0;

    // One `key=value` line per field.
    std::string to_key_value_text() const;
};

struct OutlierParams {
    double factor = 2.0;
    double percentile = 95.0;
};

// Mean consecutive-pair distance in the given order divided by the mean
// distance over all unordered pairs, both under the city-block (L1) metric.
// Lower = better arrangement. Returns 0 when all codewords coincide.
double adjacency_ratio(const Codebook& cb, const PathOrder& order);

// Number of consecutive distances exceeding tau times the median
// consecutive distance.
std::size_t jump_count(const Codebook& cb, const PathOrder& order,
                       double tau = 3.0);

// theta = factor * (percentile-th percentile of each data point's distance
// to its nearest other data point).
double outlier_threshold(const VectorSet& data, const OutlierParams& params = {});

// Codewords whose distance to the nearest data point exceeds theta.
std::size_t outlier_count(const Codebook& cb, const VectorSet& data,
                          const OutlierParams& params = {});
std::size_t outlier_count(const Codebook& cb, const VectorSet& data,
                          double theta);

// Fraction of equally spaced on-segment samples whose nearest-data distance
// is at most theta.
double inside_fraction(const Codebook& cb, const VectorSet& data,
                       std::size_t samples_per_segment = 100,
                       const OutlierParams& params = {});
double inside_fraction(const Codebook& cb, const VectorSet& data,
                       std::size_t samples_per_segment, double theta);

ArrangementReport arrangement_report(const Codebook& cb, const PathOrder& order,
                                     const VectorSet& data, double tau = 3.0,
                                     std::size_t samples_per_segment = 100,
                                     const OutlierParams& params = {});

// N x N matrix of pairwise codeword distances, row-major.
std::vector<double> heatmap_matrix(const Codebook& cb);

struct PairwiseStats {
    double mean_dist = 0.0;
    double var_dist = 0.0;
    double eigen_sum = 0.0; // trace of the sample covariance matrix
};

// Mean/variance of pairwise distances over a seeded subsample plus the
// covariance trace of the full data.
PairwiseStats pairwise_stats(const VectorSet& data, std::size_t subsample = 2000,
                             std::uint64_t seed = 0);

// Top-k principal components of mean-centered data via power iteration with
// deflation. Rows of the result are unit, mutually orthogonal directions.
VectorSet pca_directions(const VectorSet& data, std::size_t k,
                         std::uint64_t seed = 0, double tolerance = 1e-7,
                         int max_iterations = 1000);

/// Per-attribute |Pearson correlation| against a step index, L1-normalized.
struct CorrelationProfile {
    std::vector<double> weights;
    std::vector<std::string> names;
};

CorrelationProfile correlation_profile(
    const std::vector<long long>& step_indices,
    const std::vector<std::vector<double>>& scores,
    std::vector<std::string> names = {});

// Linear-interpolation percentile (numpy convention) of unsorted values.
double percentile_of(std::vector<double> values, double percentile);

} // namespace sfvq

#endif
