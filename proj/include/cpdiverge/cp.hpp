// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpdiverge/errors.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

/// Rank-R CP decomposition of an I x J x K tensor:
///   Y = sum_r weights[r] * (A.col(r) o B.col(r) o C.col(r)).
///
/// Two representations are used. In the normalized one (normalized == true)
/// every factor column has unit Euclidean norm, the sign convention below
/// holds, and weights carry all magnitudes. In the absorbed one the weights
/// are all ones and magnitudes live in the columns.
struct CpDecomposition {
  Matrix A, B, C;
  Vector weights;
  bool normalized = false;

  int rank() const { return static_cast<int>(A.cols()); }

  /// Wrap factor matrices as an absorbed-representation decomposition.
  static CpDecomposition absorbed(Matrix a, Matrix b, Matrix c) {
    if (a.cols() != b.cols() || a.cols() != c.cols() || a.cols() < 1)
      throw std::invalid_argument("CpDecomposition: factor column counts differ");
    CpDecomposition cp;
    cp.weights = Vector::Ones(a.cols());
    cp.A = std::move(a);
    cp.B = std::move(b);
    cp.C = std::move(c);
    cp.normalized = false;
    return cp;
  }
};

/// Index set D of components, kept sorted and duplicate-free (0-based).
struct ComponentGroup {
  std::vector<int> indices;

  explicit ComponentGroup(std::vector<int> idx = {}) : indices(std::move(idx)) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  }
  std::size_t size() const { return indices.size(); }
  bool contains(int r) const {
    return std::binary_search(indices.begin(), indices.end(), r);
  }
};

/// Evaluate the decomposition to a dense tensor, slice by slice:
/// Y_k = A diag(weights .* C.row(k)) B^T.
inline Tensor3 evaluate(const CpDecomposition& cp) {
  const int I = static_cast<int>(cp.A.rows());
  const int J = static_cast<int>(cp.B.rows());
  const int K = static_cast<int>(cp.C.rows());
  Tensor3 y(I, J, K);
  for (int k = 0; k < K; ++k) {
    const Vector d = cp.weights.cwiseProduct(cp.C.row(k).transpose());
    y.slice(k).noalias() = cp.A * d.asDiagonal() * cp.B.transpose();
  }
  return y;
}

/// Partial sum over the components in D only.
inline Tensor3 group_sum(const CpDecomposition& cp, const ComponentGroup& d) {
  const int R = cp.rank();
  if (d.indices.empty()) throw std::invalid_argument("group_sum: empty group");
  for (int r : d.indices)
    if (r < 0 || r >= R) throw std::invalid_argument("group_sum: component index out of range");
  Vector masked = Vector::Zero(R);
  for (int r : d.indices) masked[r] = cp.weights[r];
  CpDecomposition sub = cp;
  sub.weights = masked;
  return evaluate(sub);
}

namespace detail {

/// Flip sign so the largest-magnitude entry is positive (ties: first index).
inline double sign_convention(Eigen::Ref<Vector> col) {
  int arg = 0;
  double best = -1.0;
  for (int i = 0; i < col.size(); ++i) {
    const double m = std::abs(col[i]);
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  if (col[arg] < 0.0) {
    col = -col;
    return -1.0;
  }
  return 1.0;
}

}  // namespace detail

/// Move column magnitudes into the weights, make every factor column unit
/// norm, and apply the sign convention (largest-magnitude entry of each
/// column positive). evaluate() is unchanged.
inline CpDecomposition normalize(const CpDecomposition& cp) {
  CpDecomposition out = cp;
  const int R = cp.rank();
  for (int r = 0; r < R; ++r) {
    const double na = out.A.col(r).norm();
    const double nb = out.B.col(r).norm();
    const double nc = out.C.col(r).norm();
    if (na == 0.0 || nb == 0.0 || nc == 0.0)
      throw degenerate_component_error("normalize: zero factor column");
    out.A.col(r) /= na;
    out.B.col(r) /= nb;
    out.C.col(r) /= nc;
    double s = 1.0;
    s *= detail::sign_convention(out.A.col(r));
    s *= detail::sign_convention(out.B.col(r));
    s *= detail::sign_convention(out.C.col(r));
    out.weights[r] = cp.weights[r] * na * nb * nc * s;
  }
  out.normalized = true;
  return out;
}

/// Triple-cosine congruence of components r and s of a normalized
/// decomposition: (a_r . a_s)(b_r . b_s)(c_r . c_s), in [-1, 1].
inline double congruence(const CpDecomposition& cp, int r, int s) {
  if (!cp.normalized) throw contract_violation("congruence: decomposition must be normalized");
  const int R = cp.rank();
  if (r == s || r < 0 || s < 0 || r >= R || s >= R)
    throw std::invalid_argument("congruence: invalid component pair");
  return cp.A.col(r).dot(cp.A.col(s)) * cp.B.col(r).dot(cp.B.col(s)) *
         cp.C.col(r).dot(cp.C.col(s));
}

/// R x R matrix of |congruence| values (diagonal set to 1).
inline Matrix abs_congruence_matrix(const CpDecomposition& cp) {
  if (!cp.normalized) throw contract_violation("abs_congruence_matrix: decomposition must be normalized");
  const Matrix g =
      (cp.A.transpose() * cp.A).cwiseProduct(cp.B.transpose() * cp.B).cwiseProduct(cp.C.transpose() * cp.C);
  return g.cwiseAbs();
}

}  // namespace cpd
