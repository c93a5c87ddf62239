// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative singular-value threshold for numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-8;

/// Dense real 3-way array with dimensions (I, J, K).
///
/// Values are stored in a fixed linearization with the first index fastest:
/// entry (i, j, k) lives at offset i + I*j + I*J*k. Frontal slice k is the
/// I x J matrix Y(:,:,k); in this layout it is a contiguous column-major
/// block, so slices can be exposed as Eigen maps without copying.
class Tensor3 {
 public:
  Tensor3(int I, int J, int K) : dims_{I, J, K}, values_(checked_size(I, J, K), 0.0) {}

  Tensor3(int I, int J, int K, std::vector<double> values)
      : dims_{I, J, K}, values_(std::move(values)) {
    if (values_.size() != checked_size(I, J, K))
      throw std::invalid_argument("Tensor3: value count does not match dims");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("Tensor3: non-finite entry");
  }

  int dim1() const { return dims_[0]; }
  int dim2() const { return dims_[1]; }
  int dim3() const { return dims_[2]; }
  std::size_t size() const { return values_.size(); }

  double operator()(int i, int j, int k) const {
    return values_[static_cast<std::size_t>(i) + dims_[0] * (j + static_cast<std::size_t>(dims_[1]) * k)];
  }
  double& operator()(int i, int j, int k) {
    return values_[static_cast<std::size_t>(i) + dims_[0] * (j + static_cast<std::size_t>(dims_[1]) * k)];
  }

  Eigen::Map<const Matrix> slice(int k) const {
    return Eigen::Map<const Matrix>(values_.data() + static_cast<std::size_t>(k) * dims_[0] * dims_[1],
                                    dims_[0], dims_[1]);
  }
  Eigen::Map<Matrix> slice(int k) {
    return Eigen::Map<Matrix>(values_.data() + static_cast<std::size_t>(k) * dims_[0] * dims_[1],
                              dims_[0], dims_[1]);
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool same_dims(const Tensor3& o) const {
    return dims_[0] == o.dims_[0] && dims_[1] == o.dims_[1] && dims_[2] == o.dims_[2];
  }

  Tensor3& operator+=(const Tensor3& o) {
    require_same_dims(o);
    for (std::size_t t = 0; t < values_.size(); ++t) values_[t] += o.values_[t];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    require_same_dims(o);
    for (std::size_t t = 0; t < values_.size(); ++t) values_[t] -= o.values_[t];
    return *this;
  }
  Tensor3& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

 private:
  static std::size_t checked_size(int I, int J, int K) {
    if (I <= 0 || J <= 0 || K <= 0) throw std::invalid_argument("Tensor3: dimensions must be positive");
    return static_cast<std::size_t>(I) * J * K;
  }
  void require_same_dims(const Tensor3& o) const {
    if (!same_dims(o)) throw std::invalid_argument("Tensor3: dimension mismatch");
  }

  int dims_[3];
  std::vector<double> values_;
};

/// Outer product a o b o c: entry (i,j,k) = a_i * b_j * c_k, evaluated in
/// exactly that association so results match a direct triple loop bit for bit.
inline Tensor3 rank1(const Vector& a, const Vector& b, const Vector& c) {
  if (a.size() == 0 || b.size() == 0 || c.size() == 0)
    throw std::invalid_argument("rank1: empty vector");
  Tensor3 y(static_cast<int>(a.size()), static_cast<int>(b.size()), static_cast<int>(c.size()));
  for (int k = 0; k < c.size(); ++k)
    for (int j = 0; j < b.size(); ++j)
      for (int i = 0; i < a.size(); ++i) y(i, j, k) = a[i] * b[j] * c[k];
  return y;
}

/// Multilinear matrix multiplication (S, T, U) . G for G of size R x P x Q,
/// S: I x R, T: J x P, U: K x Q. Result entry:
///   y_ijk = sum_{r,p,q} s_ir t_jp u_kq g_rpq.
inline Tensor3 multilinear_multiply(const Tensor3& G, const Matrix& S, const Matrix& T,
                                    const Matrix& U) {
  if (S.cols() != G.dim1() || T.cols() != G.dim2() || U.cols() != G.dim3())
    throw std::invalid_argument("multilinear_multiply: inner dimension mismatch");
  const int I = static_cast<int>(S.rows());
  const int J = static_cast<int>(T.rows());
  const int K = static_cast<int>(U.rows());
  const int Q = G.dim3();
  std::vector<Matrix> mixed(Q);
  for (int q = 0; q < Q; ++q) mixed[q].noalias() = S * G.slice(q) * T.transpose();
  Tensor3 y(I, J, K);
  for (int k = 0; k < K; ++k) {
    auto yk = y.slice(k);
    for (int q = 0; q < Q; ++q) yk.noalias() += U(k, q) * mixed[q];
  }
  return y;
}

/// Slicemix (I, I, U) . G: frontal slice k' of the result is sum_k u_{k'k} G_k.
inline Tensor3 slicemix(const Tensor3& G, const Matrix& U) {
  if (U.cols() != G.dim3()) throw std::invalid_argument("slicemix: U must have dim3 columns");
  Tensor3 y(G.dim1(), G.dim2(), static_cast<int>(U.rows()));
  for (int k = 0; k < U.rows(); ++k) {
    auto yk = y.slice(k);
    for (int q = 0; q < G.dim3(); ++q) yk.noalias() += U(k, q) * G.slice(q);
  }
  return y;
}

inline double frobenius_norm(const Tensor3& y) {
  double s = 0.0;
  for (double v : y.values()) s += v * v;
  return std::sqrt(s);
}

/// Mode-n matricization. Mode-n fibers become columns; the remaining indices
/// are ordered with the lower-numbered mode fastest:
///   mode 1: I x (J*K), column j + J*k
///   mode 2: J x (I*K), column i + I*k
///   mode 3: K x (I*J), column i + I*j
inline Matrix unfold(const Tensor3& y, int mode) {
  const int I = y.dim1(), J = y.dim2(), K = y.dim3();
  switch (mode) {
    case 1: {
      Matrix m(I, J * K);
      for (int k = 0; k < K; ++k) m.middleCols(static_cast<Eigen::Index>(k) * J, J) = y.slice(k);
      return m;
    }
    case 2: {
      Matrix m(J, I * K);
      for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i)
          for (int j = 0; j < J; ++j) m(j, i + I * k) = y(i, j, k);
      return m;
    }
    case 3: {
      Matrix m(K, I * J);
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
          for (int i = 0; i < I; ++i) m(k, i + I * j) = y(i, j, k);
      return m;
    }
    default:
      throw std::invalid_argument("unfold: mode must be 1, 2 or 3");
  }
}

/// Inverse of unfold for the documented column order.
inline Tensor3 refold(const Matrix& m, int mode, int I, int J, int K) {
  Tensor3 y(I, J, K);
  switch (mode) {
    case 1:
      if (m.rows() != I || m.cols() != static_cast<Eigen::Index>(J) * K)
        throw std::invalid_argument("refold: shape mismatch");
      for (int k = 0; k < K; ++k) y.slice(k) = m.middleCols(static_cast<Eigen::Index>(k) * J, J);
      return y;
    case 2:
      if (m.rows() != J || m.cols() != static_cast<Eigen::Index>(I) * K)
        throw std::invalid_argument("refold: shape mismatch");
      for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i)
          for (int j = 0; j < J; ++j) y(i, j, k) = m(j, i + I * k);
      return y;
    case 3:
      if (m.rows() != K || m.cols() != static_cast<Eigen::Index>(I) * J)
        throw std::invalid_argument("refold: shape mismatch");
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
          for (int i = 0; i < I; ++i) y(i, j, k) = m(k, i + I * j);
      return y;
    default:
      throw std::invalid_argument("refold: mode must be 1, 2 or 3");
  }
}

/// Count of singular values above tol * sigma_1. The zero matrix has rank 0.
inline int numerical_rank(const Matrix& m, double tol = kDefaultRankTol) {
  if (tol <= 0.0) throw std::invalid_argument("numerical_rank: tol must be positive");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol * s[0]) ++r;
  return r;
}

/// Numerical rank of the mode-n unfolding; a lower bound on tensor rank.
inline int mode_rank(const Tensor3& y, int mode, double tol = kDefaultRankTol) {
  return numerical_rank(unfold(y, mode), tol);
}

}  // namespace cpd
