#include "sfvq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "sfvq/errors.hpp"

namespace sfvq {

namespace {

std::vector<double> consecutive_distances(const Codebook& cb,
                                          const PathOrder& order) {
    path_length(cb, order); // validates the permutation
    std::vector<double> out;
    out.reserve(cb.size() - 1);
    for (std::size_t k = 0; k + 1 < cb.size(); ++k)
        out.push_back(distance(cb.word(order.permutation[k]),
                               cb.word(order.permutation[k + 1]), cb.dim));
    return out;
}

double manhattan(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
        acc += std::abs(a[k] - b[k]);
    return acc;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double nearest_data_distance(const double* p, const VectorSet& data) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.count; ++i)
        best = std::min(best, squared_distance(p, data.row(i), data.dim));
    return std::sqrt(best);
}

} // namespace

double percentile_of(std::vector<double> values, double percentile) {
    if (values.empty())
        throw InvalidArgument("percentile_of: empty input");
    if (percentile < 0.0 || percentile > 100.0)
        throw InvalidArgument("percentile_of: percentile outside [0, 100]");
    std::sort(values.begin(), values.end());
    if (values.size() == 1)
        return values[0];
    const double rank = percentile / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] + (values[lo + 1] - values[lo]) * frac;
}

double adjacency_ratio(const Codebook& cb, const PathOrder& order) {
    const std::size_t n = cb.size();
    if (n < 3)
        throw InvalidArgument("adjacency_ratio: need at least 3 codewords");
    path_length(cb, order); // validates the permutation

    double consec_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k)
        consec_sum += manhattan(cb.word(order.permutation[k]),
                                cb.word(order.permutation[k + 1]), cb.dim);
    const double consec_mean = consec_sum / static_cast<double>(n - 1);

    double all_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            all_sum += manhattan(cb.word(i), cb.word(j), cb.dim);
    const double all_mean = all_sum / static_cast<double>(n * (n - 1) / 2);

    if (all_mean == 0.0)
        return 0.0; // all codewords coincide
    return consec_mean / all_mean;
}

std::size_t jump_count(const Codebook& cb, const PathOrder& order, double tau) {
    if (cb.size() < 3)
        throw InvalidArgument("jump_count: need at least 3 codewords");
    if (!(tau > 0.0))
        throw InvalidArgument("jump_count: tau must be positive");
    const auto consec = consecutive_distances(cb, order);
    const double threshold = tau * median_of(consec);
    std::size_t count = 0;
    for (double d : consec)
        if (d > threshold)
            ++count;
    return count;
}

double outlier_threshold(const VectorSet& data, const OutlierParams& params) {
    if (data.count < 2)
        throw InvalidArgument("outlier_threshold: need at least 2 data points");
    if (!(params.factor > 0.0))
        throw InvalidArgument("outlier_threshold: factor must be positive");
    std::vector<double> nn(data.count);
    for (std::size_t i = 0; i < data.count; ++i) {
        double best = std::numeric_limits<double>::infinity();
        const double* p = data.row(i);
        for (std::size_t j = 0; j < data.count; ++j) {
            if (j == i)
                continue;
            best = std::min(best, squared_distance(p, data.row(j), data.dim));
        }
        nn[i] = std::sqrt(best);
    }
    return params.factor * percentile_of(std::move(nn), params.percentile);
}

std::size_t outlier_count(const Codebook& cb, const VectorSet& data,
                          const OutlierParams& params) {
    return outlier_count(cb, data, outlier_threshold(data, params));
}

std::size_t outlier_count(const Codebook& cb, const VectorSet& data,
                          double theta) {
    if (cb.dim != data.dim)
        throw DimensionError("outlier_count: dimension mismatch");
    std::size_t count = 0;
    for (std::size_t k = 0; k < cb.size(); ++k)
        if (nearest_data_distance(cb.word(k), data) > theta)
            ++count;
    return count;
}

double inside_fraction(const Codebook& cb, const VectorSet& data,
                       std::size_t samples_per_segment,
                       const OutlierParams& params) {
    return inside_fraction(cb, data, samples_per_segment,
                           outlier_threshold(data, params));
}

double inside_fraction(const Codebook& cb, const VectorSet& data,
                       std::size_t samples_per_segment, double theta) {
    if (cb.dim != data.dim)
        throw DimensionError("inside_fraction: dimension mismatch");
    if (cb.size() < 2)
        throw InvalidArgument("inside_fraction: need at least 2 codewords");
    if (samples_per_segment == 0)
        throw InvalidArgument("inside_fraction: need at least 1 sample per segment");

    std::vector<double> point(cb.dim);
    std::size_t inside = 0, total = 0;
    for (std::size_t j = 0; j + 1 < cb.size(); ++j) {
        const double* a = cb.word(j);
        const double* b = cb.word(j + 1);
        for (std::size_t s = 0; s < samples_per_segment; ++s) {
            const double t = samples_per_segment == 1
                ? 0.5
                : static_cast<double>(s) / static_cast<double>(samples_per_segment - 1);
            for (std::size_t d = 0; d < cb.dim; ++d)
                point[d] = (1.0 - t) * a[d] + t * b[d];
            if (nearest_data_distance(point.data(), data) <= theta)
                ++inside;
            ++total;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

ArrangementReport arrangement_report(const Codebook& cb, const PathOrder& order,
                                     const VectorSet& data, double tau,
                                     std::size_t samples_per_segment,
                                     const OutlierParams& params) {
    const double theta = outlier_threshold(data, params);
    ArrangementReport r;
    r.adjacency_ratio = adjacency_ratio(cb, order);
    r.jump_count = jump_count(cb, order, tau);
    r.outlier_count = outlier_count(cb, data, theta);
    r.inside_fraction = inside_fraction(apply_order(cb, order), data,
                                        samples_per_segment, theta);
    r.total_path_length = path_length(cb, order);
    return r;
}

std::string ArrangementReport::to_key_value_text() const {
    std::ostringstream os;
    os << "adjacency_ratio=" << adjacency_ratio << '\n'
       << "jump_count=" << jump_count << '\n'
       << "outlier_count=" << outlier_count << '\n'
       << "inside_fraction=" << inside_fraction << '\n'
       << "total_path_length=" << total_path_length << '\n';
    return os.str();
}

std::vector<double> heatmap_matrix(const Codebook& cb) {
    const std::size_t n = cb.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(cb.word(i), cb.word(j), cb.dim);
            m[i * n + j] = d;
            m[j * n + i] = d;
        }
    return m;
}

PairwiseStats pairwise_stats(const VectorSet& data, std::size_t subsample,
                             std::uint64_t seed) {
    if (data.count < 2)
        throw InvalidArgument("pairwise_stats: need at least 2 data points");

    std::vector<std::size_t> rows(data.count);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (subsample >= 2 && subsample < data.count) {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> picked;
        picked.reserve(subsample);
        std::sample(rows.begin(), rows.end(), std::back_inserter(picked),
                    subsample, rng);
        rows = std::move(picked);
    }

    double sum = 0.0, sum_sq = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            const double d = distance(data.row(rows[i]), data.row(rows[j]), data.dim);
            sum += d;
            sum_sq += d * d;
            ++pairs;
        }

    PairwiseStats st;
    st.mean_dist = sum / static_cast<double>(pairs);
    st.var_dist = sum_sq / static_cast<double>(pairs) - st.mean_dist * st.mean_dist;
    st.var_dist = std::max(0.0, st.var_dist);

    // Covariance trace over the full data equals the eigenvalue sum.
    std::vector<double> mean(data.dim, 0.0);
    for (std::size_t i = 0; i < data.count; ++i)
        for (std::size_t d = 0; d < data.dim; ++d)
            mean[d] += data.row(i)[d];
    for (double& v : mean)
        v /= static_cast<double>(data.count);
    double trace = 0.0;
    for (std::size_t i = 0; i < data.count; ++i)
        for (std::size_t d = 0; d < data.dim; ++d) {
            const double c = data.row(i)[d] - mean[d];
            trace += c * c;
        }
    st.eigen_sum = trace / static_cast<double>(data.count - 1);
    return st;
}

VectorSet pca_directions(const VectorSet& data, std::size_t k,
                         std::uint64_t seed, double tolerance,
                         int max_iterations) {
    if (k == 0)
        throw InvalidArgument("pca_directions: k must be positive");
    if (k > data.dim)
        throw InvalidArgument("pca_directions: k exceeds the data dimension");
    if (data.count <= k)
        throw InvalidArgument("pca_directions: need more samples than components");

    const std::size_t dim = data.dim;

    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < data.count; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            mean[d] += data.row(i)[d];
    for (double& v : mean)
        v /= static_cast<double>(data.count);

    // Sample covariance, deflated in place as components are found.
    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t i = 0; i < data.count; ++i) {
        const double* r = data.row(i);
        for (std::size_t a = 0; a < dim; ++a) {
            const double ca = r[a] - mean[a];
            for (std::size_t b = a; b < dim; ++b)
                cov[a * dim + b] += ca * (r[b] - mean[b]);
        }
    }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a; b < dim; ++b) {
            cov[a * dim + b] /= static_cast<double>(data.count - 1);
            cov[b * dim + a] = cov[a * dim + b];
        }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    VectorSet comps(dim, k);
    std::vector<double> v(dim), w(dim);
    for (std::size_t c = 0; c < k; ++c) {
        for (double& x : v)
            x = gauss(rng);
        // Orthogonalize against found components so the start vector is in
        // the right subspace.
        for (std::size_t p = 0; p < c; ++p) {
            const double proj = dot(v.data(), comps.row(p), dim);
            for (std::size_t d = 0; d < dim; ++d)
                v[d] -= proj * comps.row(p)[d];
        }
        double vn = norm(v.data(), dim);
        if (vn == 0.0) {
            v[c % dim] = 1.0;
            vn = 1.0;
        }
        for (double& x : v)
            x /= vn;

        for (int it = 0; it < max_iterations; ++it) {
            for (std::size_t a = 0; a < dim; ++a)
                w[a] = dot(cov.data() + a * dim, v.data(), dim);
            for (std::size_t p = 0; p < c; ++p) {
                const double proj = dot(w.data(), comps.row(p), dim);
                for (std::size_t d = 0; d < dim; ++d)
                    w[d] -= proj * comps.row(p)[d];
            }
            const double wn = norm(w.data(), dim);
            if (wn == 0.0)
                break; // v is (numerically) in the null space; keep it
            double align = 0.0;
            for (std::size_t d = 0; d < dim; ++d)
                align += (w[d] / wn) * v[d];
            const bool converged = 1.0 - std::abs(align) < tolerance;
            const double sign = align < 0.0 ? -1.0 : 1.0;
            for (std::size_t d = 0; d < dim; ++d)
                v[d] = sign * w[d] / wn;
            if (converged)
                break;
        }

        // Deterministic sign: largest-magnitude coordinate positive.
        std::size_t arg = 0;
        for (std::size_t d = 1; d < dim; ++d)
            if (std::abs(v[d]) > std::abs(v[arg]))
                arg = d;
        if (v[arg] < 0.0)
            for (double& x : v)
                x = -x;

        std::copy(v.begin(), v.end(), comps.row(c));

        // Deflate: cov -= lambda v v^T.
        double lambda = 0.0;
        for (std::size_t a = 0; a < dim; ++a)
            lambda += v[a] * dot(cov.data() + a * dim, v.data(), dim);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b)
                cov[a * dim + b] -= lambda * v[a] * v[b];
    }
    return comps;
}

CorrelationProfile correlation_profile(
    const std::vector<long long>& step_indices,
    const std::vector<std::vector<double>>& scores,
    std::vector<std::string> names) {
    if (step_indices.size() < 3)
        throw InvalidArgument("correlation_profile: need at least 3 steps");
    if (scores.empty())
        throw InvalidArgument("correlation_profile: need at least one attribute");
    for (const auto& s : scores)
        if (s.size() != step_indices.size())
            throw DimensionError("correlation_profile: score list length does not "
                                 "match step indices");
    if (!names.empty() && names.size() != scores.size())
        throw DimensionError("correlation_profile: names/scores size mismatch");

    const std::size_t n = step_indices.size();
    const double dn = static_cast<double>(n);

    double mean_x = 0.0;
    for (long long s : step_indices)
        mean_x += static_cast<double>(s);
    mean_x /= dn;
    double var_x = 0.0;
    for (long long s : step_indices) {
        const double c = static_cast<double>(s) - mean_x;
        var_x += c * c;
    }

    CorrelationProfile profile;
    profile.weights.resize(scores.size(), 0.0);
    for (std::size_t a = 0; a < scores.size(); ++a) {
        const auto& y = scores[a];
        double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / dn;
        double var_y = 0.0, covar = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cy = y[i] - mean_y;
            var_y += cy * cy;
            covar += (static_cast<double>(step_indices[i]) - mean_x) * cy;
        }
        // Zero-variance guard: constant scores (or indices) correlate 0.
        if (var_x == 0.0 || var_y == 0.0)
            profile.weights[a] = 0.0;
        else
            profile.weights[a] = std::abs(covar / std::sqrt(var_x * var_y));
    }

    const double total =
        std::accumulate(profile.weights.begin(), profile.weights.end(), 0.0);
    if (total > 0.0)
        for (double& w : profile.weights)
            w /= total;

    if (names.empty()) {
        for (std::size_t a = 0; a < scores.size(); ++a)
            names.push_back("attr" + std::to_string(a));
    }
    profile.names = std::move(names);
    return profile;
}

} // namespace sfvq
