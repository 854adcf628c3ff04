#ifndef SFVQ_VECTOR_SET_HPP
#define SFVQ_VECTOR_SET_HPP

#include <cstddef>
#include <vector>

namespace sfvq {

/// An ordered collection of fixed-dimension real vectors, stored row-major.
/// Used for training data, latent samples, and codewords-as-points alike.
struct VectorSet {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<double> data; // count * dim values, row i at data[i*dim]

    VectorSet() = default;
    VectorSet(std::size_t dim_, std::size_t count_)
        : dim(dim_), count(count_), data(dim_ * count_, 0.0) {}

    const double* row(std::size_t i) const { return data.data() + i * dim; }
    double* row(std::size_t i) { return data.data() + i * dim; }

    bool empty() const { return count == 0; }

    // Throws NumericError on non-finite values, DimensionError if the data
    // extent disagrees with count*dim.
    void validate() const;
};

// Euclidean helpers shared across modules. All assume equal dimension.
double squared_distance(const double* a, const double* b, std::size_t dim);
double distance(const double* a, const double* b, std::size_t dim);
double norm(const double* v, std::size_t dim);
double dot(const double* a, const double* b, std::size_t dim);

} // namespace sfvq

#endif
