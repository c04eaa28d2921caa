#pragma once

#include <cmath>
#include <random>

#include "uscgibbs/operator_core.hpp"

namespace testing_support {

using namespace uscgibbs;

inline Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline HermitianOperator random_hermitian(Index dim, std::mt19937_64& rng) {
  const Matrix m = random_complex(dim, dim, rng);
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

inline DensityMatrix random_state(Index dim, std::mt19937_64& rng) {
  const Matrix m = random_complex(dim, dim, rng);
  return DensityMatrix::normalized(HermitianOperator(m * m.adjoint()));
}

inline Matrix random_unitary(Index dim, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Matrix> qr(random_complex(dim, dim, rng));
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Reference qutrit entries, written out here rather than taken from the library.
inline RealMatrix qutrit_h() {
  RealMatrix h(3, 3);
  h << 1, 1, 0, 1, 0, 1, 0, 1, -1;
  return h;
}

inline RealVector qutrit_a() { return RealVector{{1.0, 0.0, -0.5}}; }

} // namespace testing_support
