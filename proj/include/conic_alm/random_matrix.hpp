#pragma once

#include <random>

#include <Eigen/Dense>

#include "conic_alm/sym_matrix.hpp"

// Seeded random draws shared by instance generators and samplers.

namespace conic_alm {

/// i.i.d. N(0, 1) entries, filled column by column.
Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);
/// Symmetric part of a Gaussian matrix.
SymMatrix random_symmetric(std::mt19937_64& rng, Eigen::Index n);
/// Q factor of a Gaussian matrix with the signs fixed by diag(R) > 0.
Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, Eigen::Index n);

}  // namespace conic_alm
