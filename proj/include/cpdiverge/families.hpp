// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cpdiverge/cp.hpp"
#include "cpdiverge/rng.hpp"
#include "cpdiverge/sgsd.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

enum class FamilyKind { r3_example, r4_example, r6_example, generic_r3, generic_332 };

inline const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::r3_example: return "r3";
    case FamilyKind::r4_example: return "r4";
    case FamilyKind::r6_example: return "r6";
    case FamilyKind::generic_r3: return "generic-r3";
    case FamilyKind::generic_332: return "generic-332";
  }
  return "?";
}

/// Default n grid for sweep experiments: one snapshot per decade.
inline std::vector<long> default_n_grid() { return {10, 100, 1000, 10000}; }

/// A parametrized sequence of CP decompositions n -> snapshot(n) whose
/// evaluation converges to the boundary tensor `limit` at an O(1/n) rate,
/// while the component weights diverge. Snapshots are produced in absorbed
/// representation (weights all one, magnitudes inside the factor columns);
/// normalize() recovers the diverging weights.
class SequenceFamily {
 public:
  FamilyKind kind() const { return kind_; }
  int rank() const { return rank_; }
  std::uint64_t seed() const { return seed_; }
  int dim1() const { return limit_.dim1(); }
  int dim2() const { return limit_.dim2(); }
  int dim3() const { return limit_.dim3(); }
  const Tensor3& limit() const { return limit_; }
  const Matrix& limit_factor_a() const { return limit_a_; }
  const Matrix& limit_factor_b() const { return limit_b_; }
  const Matrix& limit_factor_c() const { return limit_c_; }
  int q_retries() const { return q_retries_; }
  double param_a() const { return a_; }
  double param_e() const { return e_; }
  double param_f() const { return f_; }

  CpDecomposition snapshot(long n) const {
    if (n < 1) throw std::invalid_argument("SequenceFamily: n must be >= 1");
    const double nn = static_cast<double>(n);
    switch (kind_) {
      case FamilyKind::r3_example: {
        const double an = a_ + 1.0 / nn, bn = a_ - 1.0 / nn, cn = a_ + 2.0 / nn;
        Matrix a(3, 3), b(3, 3), c(2, 3);
        a << 1, 0, 1,
            0, 1, e_ * (cn - an) / (f_ * (cn - bn)),
            0, 0, (cn - an) / f_;
        b << 1, 0, 0,
            0, 1, 0,
            f_ / (an - cn), e_ / (bn - cn), f_ / (cn - an);
        c << 1, 1, 1,
            an, bn, cn;
        return CpDecomposition::absorbed(std::move(a), std::move(b), std::move(c));
      }
      case FamilyKind::r4_example: {
        Matrix a(fa_.rows(), 4), b(fb_.rows(), 4), c(fz_.rows(), 4);
        a.col(0) = fa_.col(0) + fx_.col(0) / nn;
        a.col(1) = fa_.col(1) + fx_.col(1) / nn;
        a.col(2) = -fat_.col(0) - fx_.col(2) / nn;
        a.col(3) = -fat_.col(1) - fx_.col(3) / nn;
        b.col(0) = fb_.col(0) + fy_.col(0) / nn;
        b.col(1) = fb_.col(1) + fy_.col(1) / nn;
        b.col(2) = fbt_.col(0) + fy_.col(2) / nn;
        b.col(3) = fbt_.col(1) + fy_.col(3) / nn;
        for (int r = 0; r < 4; ++r) c.col(r) = nn * (fc_ + fz_.col(r) / nn);
        return CpDecomposition::absorbed(std::move(a), std::move(b), std::move(c));
      }
      case FamilyKind::r6_example: {
        Matrix a(fs_.rows(), 6), b(ft_.rows(), 6), c(fu_.rows(), 6);
        a.leftCols(3) = fs_ * base_a();
        a.rightCols(3) = -fs_ * base_at();
        for (int r = 0; r < 6; ++r) a.col(r) += (r < 3 ? 1.0 : -1.0) * fx_.col(r) / nn;
        b.leftCols(3) = ft_ * base_b();
        b.rightCols(3) = ft_ * base_bt();
        b += fy_ / nn;
        c.leftCols(3) = fu_ * base_c();
        c.rightCols(3) = fu_ * base_ct();
        c += fz_ / nn;
        c *= nn;
        return CpDecomposition::absorbed(std::move(a), std::move(b), std::move(c));
      }
      case FamilyKind::generic_r3:
      case FamilyKind::generic_332: {
        const double l1 = a_ + p_[0] / nn, l2 = a_ + p_[1] / nn, l3 = a_ + p_[2] / nn;
        const ClosedForm3x3 cf = closed_form_3x3(l1, l2, l3, d_, e_, f_);
        Matrix a = cf.eigvecs;
        Matrix b = cf.b_raw;  // exact (eigvecs)^{-T}
        const bool three = kind_ == FamilyKind::generic_r3;
        Matrix c(three ? 3 : 2, 3);
        c.row(0).setOnes();
        c.row(1) << l1, l2, l3;
        if (three) c.row(2) << alpha_ + s_ * p_[0] / nn, alpha_ + s_ * p_[1] / nn, alpha_ + s_ * p_[2] / nn;
        return CpDecomposition::absorbed(std::move(a), std::move(b), std::move(c));
      }
    }
    throw std::logic_error("SequenceFamily: unknown kind");
  }

  /// The two fixed 3-component factor triples whose CP evaluations coincide
  /// (both equal the same 2 x 2 x 2 rank-2 array).
  static Matrix base_a() {
    Matrix m(2, 3);
    m << 1, 0, 0, 0, 1, -1;
    return m;
  }
  static Matrix base_b() {
    Matrix m(2, 3);
    m << 1, 1, 1, 0, 1, 0;
    return m;
  }
  static Matrix base_c() {
    Matrix m(2, 3);
    m << 1, 0, 0, 0, 1, 1;
    return m;
  }
  static Matrix base_at() {
    Matrix m(2, 3);
    m << 1, 0, 0, 1, 1, -1;
    return m;
  }
  static Matrix base_bt() {
    Matrix m(2, 3);
    m << 1, 0, 1, 0, 1, 0;
    return m;
  }
  static Matrix base_ct() {
    Matrix m(2, 3);
    m << 1, 0, 1, 0, 1, 0;
    return m;
  }

  friend SequenceFamily family_r3(double a, double e, double f);
  friend SequenceFamily family_r4(std::uint64_t seed, int I, int J, int K);
  friend SequenceFamily family_r6(std::uint64_t seed, int I, int J, int K);
  friend SequenceFamily family_generic(std::uint64_t seed, FamilyKind kind);

 private:
  SequenceFamily() : limit_(1, 1, 1) {}

  FamilyKind kind_ = FamilyKind::r3_example;
  int rank_ = 3;
  std::uint64_t seed_ = 0;
  double a_ = 0, e_ = 1, f_ = 1;           // r3 and generic slice-2 entries
  double d_ = 0, alpha_ = 0, s_ = 0;       // generic extras
  double p_[3] = {1, -1, 2};               // generic diagonal spacings
  Matrix fa_, fb_, fat_, fbt_;             // r4 column pairs
  Vector fc_;                              // r4 shared third-mode vector
  Matrix fs_, ft_, fu_;                    // r6 embeddings
  Matrix fx_, fy_, fz_;                    // perturbation matrices
  int q_retries_ = 0;
  Tensor3 limit_;
  Matrix limit_a_, limit_b_, limit_c_;
};

/// Three diverging components on a 3 x 3 x 2 boundary tensor with slices
/// [I | [[a,0,f],[0,a,e],[0,0,a]]]; the first factor matrix converges to a
/// rank-2 limit, so the group is not proportional.
inline SequenceFamily family_r3(double a, double e, double f) {
  if (e == 0.0 || f == 0.0) throw std::invalid_argument("family_r3: e and f must be nonzero");
  SequenceFamily fam;
  fam.kind_ = FamilyKind::r3_example;
  fam.rank_ = 3;
  fam.a_ = a;
  fam.e_ = e;
  fam.f_ = f;
  fam.limit_ = Tensor3(3, 3, 2);
  fam.limit_.slice(0) = Matrix::Identity(3, 3);
  Matrix g2(3, 3);
  g2 << a, 0, f, 0, a, e, 0, 0, a;
  fam.limit_.slice(1) = g2;
  fam.limit_a_ = Matrix(3, 3);
  fam.limit_a_ << 1, 0, 1, 0, 1, e / (3.0 * f), 0, 0, 0;
  fam.limit_b_ = Matrix::Zero(3, 3);
  fam.limit_b_.row(2).setOnes();  // columns normalized to third entry 1
  fam.limit_c_ = Matrix(2, 3);
  fam.limit_c_ << 1, 1, 1, a, a, a;
  return fam;
}

/// Four diverging components built from two column pairs factoring the same
/// rank-2 matrix; the limit is assembled from the twelve first-order terms.
inline SequenceFamily family_r4(std::uint64_t seed, int I = 6, int J = 6, int K = 5) {
  if (I < 6 || J < 6 || K < 5) throw std::invalid_argument("family_r4: need I,J >= 6 and K >= 5");
  SequenceFamily fam;
  fam.kind_ = FamilyKind::r4_example;
  fam.rank_ = 4;
  fam.seed_ = seed;
  Rng rng(seed);
  fam.fa_ = rng.gaussian_matrix(I, 2);
  fam.fb_ = rng.gaussian_matrix(J, 2);
  Matrix q = rng.gaussian_matrix(2, 2);
  while (std::abs(q.determinant()) < 1e-3) {
    q = rng.gaussian_matrix(2, 2);
    ++fam.q_retries_;
  }
  fam.fat_ = fam.fa_ * q;
  fam.fbt_ = fam.fb_ * q.inverse().transpose();
  fam.fc_ = rng.gaussian_vector(K);
  fam.fx_ = rng.gaussian_matrix(I, 4);
  fam.fy_ = rng.gaussian_matrix(J, 4);
  fam.fz_ = rng.gaussian_matrix(K, 4);

  Tensor3 x(I, J, K);
  auto add = [&x](double sgn, const Vector& u, const Vector& v, const Vector& w) {
    Tensor3 t = rank1(u, v, w);
    t *= sgn;
    x += t;
  };
  for (int r = 0; r < 2; ++r) {
    add(+1, fam.fa_.col(r), fam.fb_.col(r), fam.fz_.col(r));
    add(+1, fam.fa_.col(r), fam.fy_.col(r), fam.fc_);
    add(+1, fam.fx_.col(r), fam.fb_.col(r), fam.fc_);
  }
  for (int r = 0; r < 2; ++r) {
    add(-1, fam.fat_.col(r), fam.fbt_.col(r), fam.fz_.col(r + 2));
    add(-1, fam.fat_.col(r), fam.fy_.col(r + 2), fam.fc_);
    add(-1, fam.fx_.col(r + 2), fam.fbt_.col(r), fam.fc_);
  }
  fam.limit_ = std::move(x);

  fam.limit_a_ = Matrix(I, 4);
  fam.limit_a_ << fam.fa_.col(0), fam.fa_.col(1), -fam.fat_.col(0), -fam.fat_.col(1);
  fam.limit_b_ = Matrix(J, 4);
  fam.limit_b_ << fam.fb_.col(0), fam.fb_.col(1), fam.fbt_.col(0), fam.fbt_.col(1);
  fam.limit_c_ = Matrix(K, 4);
  for (int r = 0; r < 4; ++r) fam.limit_c_.col(r) = fam.fc_;
  return fam;
}

/// Six diverging components built from the two fixed factor triples that
/// evaluate to the same rank-2 array, embedded by random 2-column matrices.
inline SequenceFamily family_r6(std::uint64_t seed, int I = 8, int J = 8, int K = 8) {
  if (I < 8 || J < 8 || K < 8) throw std::invalid_argument("family_r6: need I,J,K >= 8");
  SequenceFamily fam;
  fam.kind_ = FamilyKind::r6_example;
  fam.rank_ = 6;
  fam.seed_ = seed;
  Rng rng(seed);
  fam.fs_ = rng.gaussian_matrix(I, 2);
  fam.ft_ = rng.gaussian_matrix(J, 2);
  fam.fu_ = rng.gaussian_matrix(K, 2);
  fam.fx_ = rng.gaussian_matrix(I, 6);
  fam.fy_ = rng.gaussian_matrix(J, 6);
  fam.fz_ = rng.gaussian_matrix(K, 6);

  const Matrix sa = fam.fs_ * SequenceFamily::base_a();
  const Matrix tb = fam.ft_ * SequenceFamily::base_b();
  const Matrix uc = fam.fu_ * SequenceFamily::base_c();
  const Matrix sat = fam.fs_ * SequenceFamily::base_at();
  const Matrix tbt = fam.ft_ * SequenceFamily::base_bt();
  const Matrix uct = fam.fu_ * SequenceFamily::base_ct();

  Tensor3 x(I, J, K);
  auto add = [&x](double sgn, const Vector& u, const Vector& v, const Vector& w) {
    Tensor3 t = rank1(u, v, w);
    t *= sgn;
    x += t;
  };
  for (int r = 0; r < 3; ++r) {
    add(+1, sa.col(r), tb.col(r), fam.fz_.col(r));
    add(+1, sa.col(r), fam.fy_.col(r), uc.col(r));
    add(+1, fam.fx_.col(r), tb.col(r), uc.col(r));
  }
  for (int s = 0; s < 3; ++s) {
    add(-1, sat.col(s), tbt.col(s), fam.fz_.col(s + 3));
    add(-1, sat.col(s), fam.fy_.col(s + 3), uct.col(s));
    add(-1, fam.fx_.col(s + 3), tbt.col(s), uct.col(s));
  }
  fam.limit_ = std::move(x);

  fam.limit_a_ = Matrix(I, 6);
  fam.limit_a_.leftCols(3) = sa;
  fam.limit_a_.rightCols(3) = -sat;
  fam.limit_b_ = Matrix(J, 6);
  fam.limit_b_.leftCols(3) = tb;
  fam.limit_b_.rightCols(3) = tbt;
  fam.limit_c_ = Matrix(K, 6);
  fam.limit_c_.leftCols(3) = uc;
  fam.limit_c_.rightCols(3) = uct;
  return fam;
}

/// Generic boundary family: the limit is a normalized core with all slice
/// diagonals constant (a and alpha) and nonzero off-diagonal entries, and the
/// snapshots perturb the diagonals to distinct eigenvalues at spacing 1/n.
/// Factors are assembled from the closed-form joint eigenvectors; all three
/// converge to rank-1 matrices.
///
/// The slice-3 off-diagonals are tied to slice 2 (delta = s*d etc., random
/// nonzero s): along a sequence with shared eigenvectors, constant
/// off-diagonals and eigenvalue spacing O(1/n), the limit's third slice is
/// necessarily an affine function of the second.
inline SequenceFamily family_generic(std::uint64_t seed, FamilyKind kind) {
  if (kind != FamilyKind::generic_r3 && kind != FamilyKind::generic_332)
    throw std::invalid_argument("family_generic: kind must be generic_r3 or generic_332");
  SequenceFamily fam;
  fam.kind_ = kind;
  fam.rank_ = 3;
  fam.seed_ = seed;
  Rng rng(seed);
  fam.a_ = rng.gaussian();
  fam.d_ = rng.signed_magnitude();
  fam.e_ = rng.signed_magnitude();
  fam.f_ = rng.signed_magnitude();
  fam.alpha_ = rng.gaussian();
  fam.s_ = rng.signed_magnitude();
  const double spread = 0.5 + rng.uniform();
  fam.p_[0] = spread;
  fam.p_[1] = -spread;
  fam.p_[2] = 2.0 * spread;

  const bool three = kind == FamilyKind::generic_r3;
  fam.limit_ = Tensor3(3, 3, three ? 3 : 2);
  fam.limit_.slice(0) = Matrix::Identity(3, 3);
  Matrix g2(3, 3);
  g2 << fam.a_, fam.d_, fam.f_, 0, fam.a_, fam.e_, 0, 0, fam.a_;
  fam.limit_.slice(1) = g2;
  if (three)
    fam.limit_.slice(2) =
        fam.alpha_ * Matrix::Identity(3, 3) + fam.s_ * (g2 - fam.a_ * Matrix::Identity(3, 3));

  fam.limit_a_ = Matrix::Zero(3, 3);
  fam.limit_a_.row(0).setOnes();
  fam.limit_b_ = Matrix::Zero(3, 3);
  fam.limit_b_.row(2).setOnes();
  fam.limit_c_ = Matrix(three ? 3 : 2, 3);
  fam.limit_c_.row(0).setOnes();
  fam.limit_c_.row(1).setConstant(fam.a_);
  if (three) fam.limit_c_.row(2).setConstant(fam.alpha_);
  return fam;
}

}  // namespace cpd
