#include "nttkit/random.hpp"

#include <cmath>

namespace nttkit {

cplx gaussian(Rng& rng, Field field) {
    std::normal_distribution<double> normal(0.0, 1.0);
    if (field == Field::Real) return {normal(rng), 0.0};
    const double re = normal(rng);
    const double im = normal(rng);
    return cplx(re, im) / std::sqrt(2.0);
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, Field field) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = gaussian(rng, field);
    return m;
}

Vector gaussian_vector(Index size, Rng& rng, Field field) {
    Vector v(size);
    for (Index i = 0; i < size; ++i) v[i] = gaussian(rng, field);
    return v;
}

} // namespace nttkit
