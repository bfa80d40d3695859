#pragma once

#include <random>

#include "nttkit/common.hpp"

namespace nttkit {

using Rng = std::mt19937_64;

/// Scalar field used when sampling random entries.
enum class Field { Real, Complex };

/// Standard Gaussian: N(0,1) for Real, (N(0,1) + i N(0,1)) / sqrt(2) for Complex.
cplx gaussian(Rng& rng, Field field);

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, Field field);

Vector gaussian_vector(Index size, Rng& rng, Field field);

} // namespace nttkit
