#include "sfvq/vector_set.hpp"

#include <cmath>
#include <string>

#include "sfvq/errors.hpp"

namespace sfvq {

void VectorSet::validate() const {
    if (data.size() != dim * count)
        throw DimensionError("VectorSet extent mismatch: have " +
                             std::to_string(data.size()) + " values, expected " +
                             std::to_string(dim * count));
    for (double v : data)
        if (!std::isfinite(v))
            throw NumericError("VectorSet contains a non-finite value");
}

double squared_distance(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

double distance(const double* a, const double* b, std::size_t dim) {
    return std::sqrt(squared_distance(a, b, dim));
}

double norm(const double* v, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
        acc += v[k] * v[k];
    return std::sqrt(acc);
}

double dot(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
        acc += a[k] * b[k];
    return acc;
}

} // namespace sfvq
