// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cpdiverge/tensor.hpp"

namespace cpd {

/// Seeded generator with an explicit normal sampler (Marsaglia polar method),
/// so draws do not depend on the standard library's normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Vector gaussian_vector(int n) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = gaussian();
    return x;
  }

  Matrix gaussian_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) m(r, c) = gaussian();
    return m;
  }

  Vector unit_vector(int n) {
    Vector x = gaussian_vector(n);
    double nrm = x.norm();
    while (nrm < 1e-12) {
      x = gaussian_vector(n);
      nrm = x.norm();
    }
    return x / nrm;
  }

  /// Magnitude in [0.5, 1.5) with a random sign; bounded away from zero.
  double signed_magnitude() {
    const double m = 0.5 + uniform();
    return uniform() < 0.5 ? -m : m;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cpd
