#pragma once

#include <random>

#include "dlrk/common.hpp"

namespace testing {

inline dlrk::Matrix random_matrix(dlrk::Index rows, dlrk::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  dlrk::Matrix m(rows, cols);
  for (dlrk::Index i = 0; i < m.size(); ++i) m.data()[i] = N(rng);
  return m;
}

// Euclidean-orthonormal columns.
inline dlrk::Matrix random_orthonormal(dlrk::Index rows, dlrk::Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<dlrk::Matrix> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * dlrk::Matrix::Identity(rows, cols);
}

inline double max_abs(const dlrk::Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
