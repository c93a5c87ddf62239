// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cpdiverge/cp.hpp"
#include "cpdiverge/rng.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

struct AlsOptions {
  long max_iters = 500;
  double rel_tol = 1e-8;       // relative fit change per sweep
  std::uint64_t seed = 0;
  enum class Init { random, hosvd } init = Init::random;
  long record_stride = 1;      // record every k-th sweep (first and last always)
  double ridge_scale = 1e-12;  // ridge is ridge_scale * ||Z||^2 on singular Grams
};

struct FitRecord {
  long iter = 0;
  double fit_error = 0;
  Vector weights;          // signed, per the normalized sign convention
  Matrix abs_congruence;   // R x R, diagonal 1

  double max_abs_weight() const { return weights.cwiseAbs().maxCoeff(); }
  double min_congruence() const {
    const int r = static_cast<int>(abs_congruence.rows());
    if (r < 2) return 1.0;
    double m = 1.0;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) m = std::min(m, abs_congruence(i, j));
    return m;
  }
};

struct FitTrace {
  std::vector<FitRecord> records;
  CpDecomposition final_cp;  // normalized representation
  enum class Termination { converged, max_iters } termination = Termination::max_iters;
  long iterations = 0;
  bool ridge_used = false;       // some sweep needed a regularized solve
  double target_norm = 0;        // ||Z||
  double final_rel_change = 0;   // relative fit change at the last sweep
};

namespace detail {

// kr.col(r) = kron(outer.col(r), inner.col(r)); inner index fastest.
inline void khatri_rao_into(const Matrix& outer, const Matrix& inner, Matrix& kr) {
  const int no = static_cast<int>(outer.rows());
  const int ni = static_cast<int>(inner.rows());
  for (int r = 0; r < outer.cols(); ++r)
    for (int k = 0; k < no; ++k) kr.col(r).segment(static_cast<Eigen::Index>(k) * ni, ni) = outer(k, r) * inner.col(r);
}

inline void normalize_columns_zero_safe(Matrix& m) {
  for (int r = 0; r < m.cols(); ++r) {
    const double nrm = m.col(r).norm();
    if (nrm > 0.0)
      m.col(r) /= nrm;
    else
      m.col(r) = Vector::Unit(m.rows(), r % m.rows());
  }
}

inline Matrix init_factor(const Matrix& unfolding, int rows, int r, AlsOptions::Init init, Rng& rng) {
  Matrix f(rows, r);
  int filled = 0;
  if (init == AlsOptions::Init::hosvd) {
    Eigen::JacobiSVD<Matrix> svd(unfolding, Eigen::ComputeFullU);
    filled = std::min<int>(r, static_cast<int>(svd.matrixU().cols()));
    f.leftCols(filled) = svd.matrixU().leftCols(filled);
  }
  for (int c = filled; c < r; ++c) f.col(c) = rng.unit_vector(rows);
  return f;
}

}  // namespace detail

/// Alternating least squares for the rank-R approximation of Z. Each sweep
/// solves the three linear subproblems in turn (A given B,C; then B; then C)
/// and renormalizes so the weights stay the sole magnitude carrier. The fit
/// error per sweep comes from the normal-equations identity
///   ||Z - Y||^2 = ||Z||^2 - 2<C_abs, M> + sum((C_abs^T C_abs) .* Gram),
/// which needs no tensor reconstruction; the final record is recomputed from
/// an explicit evaluation.
inline FitTrace fit_als(const Tensor3& z, int r, AlsOptions opts = {}) {
  if (r < 1) throw std::invalid_argument("fit_als: rank must be >= 1");
  if (opts.max_iters < 1 || opts.record_stride < 1)
    throw std::invalid_argument("fit_als: invalid options");
  const int I = z.dim1(), J = z.dim2(), K = z.dim3();
  const Matrix z1 = unfold(z, 1), z2 = unfold(z, 2), z3 = unfold(z, 3);
  const double nz = frobenius_norm(z);
  const double nz2 = nz * nz;
  const double ridge = opts.ridge_scale * nz2;

  Rng rng(opts.seed);
  Matrix a = detail::init_factor(z1, I, r, opts.init, rng);
  Matrix b = detail::init_factor(z2, J, r, opts.init, rng);
  Matrix c = detail::init_factor(z3, K, r, opts.init, rng);
  detail::normalize_columns_zero_safe(a);
  detail::normalize_columns_zero_safe(b);
  detail::normalize_columns_zero_safe(c);

  FitTrace trace;
  trace.target_norm = nz;

  Matrix kr1(static_cast<Eigen::Index>(J) * K, r), kr2(static_cast<Eigen::Index>(I) * K, r),
      kr3(static_cast<Eigen::Index>(I) * J, r);
  Matrix m1(I, r), m2(J, r), m3(K, r), gram(r, r), c_abs(K, r);
  Eigen::LLT<Matrix> llt(r);

  auto solve_into = [&](const Matrix& gram_in, const Matrix& rhs, Matrix& out) {
    // rhs is (n x R); solves out * gram = rhs.
    gram = gram_in;
    llt.compute(gram);
    if (llt.info() != Eigen::Success) {
      gram.diagonal().array() += ridge;
      llt.compute(gram);
      trace.ridge_used = true;
    }
    out = llt.solve(rhs.transpose()).transpose();
  };

  double prev_err = -1.0;
  Vector weights = Vector::Zero(r);
  auto record = [&](long iter, double err) {
    CpDecomposition cp;
    cp.A = a;
    cp.B = b;
    cp.C = c;
    cp.weights = weights;
    cp.normalized = false;
    CpDecomposition norm;
    bool ok = true;
    try {
      norm = normalize(cp);
    } catch (const degenerate_component_error&) {
      ok = false;  // zero weight components (e.g. zero target); keep raw
    }
    FitRecord rec;
    rec.iter = iter;
    rec.fit_error = err;
    if (ok) {
      rec.weights = norm.weights;
      rec.abs_congruence = abs_congruence_matrix(norm);
    } else {
      rec.weights = weights;
      rec.abs_congruence = Matrix::Identity(r, r);
    }
    trace.records.push_back(std::move(rec));
  };

  long iter = 0;
  double err = nz;
  bool converged = false;
  while (iter < opts.max_iters && !converged) {
    ++iter;
    detail::khatri_rao_into(c, b, kr1);
    m1.noalias() = z1 * kr1;
    solve_into((c.transpose() * c).cwiseProduct(b.transpose() * b), m1, a);
    detail::normalize_columns_zero_safe(a);

    detail::khatri_rao_into(c, a, kr2);
    m2.noalias() = z2 * kr2;
    solve_into((c.transpose() * c).cwiseProduct(a.transpose() * a), m2, b);
    detail::normalize_columns_zero_safe(b);

    detail::khatri_rao_into(b, a, kr3);
    m3.noalias() = z3 * kr3;
    const Matrix gram3 = (b.transpose() * b).cwiseProduct(a.transpose() * a);
    solve_into(gram3, m3, c_abs);

    const double dot = c_abs.cwiseProduct(m3).sum();
    const double quad = (c_abs.transpose() * c_abs).cwiseProduct(gram3).sum();
    err = std::sqrt(std::max(0.0, nz2 - 2.0 * dot + quad));
    for (int col = 0; col < r; ++col) weights[col] = c_abs.col(col).norm();
    c = c_abs;
    detail::normalize_columns_zero_safe(c);

    const bool last_allowed = iter == opts.max_iters;
    if (prev_err >= 0.0) {
      const double relchg = std::abs(prev_err - err) / std::max(err, 1e-300);
      trace.final_rel_change = relchg;
      if (relchg < opts.rel_tol || err <= 1e-14 * nz) converged = true;
    }
    prev_err = err;
    if ((iter - 1) % opts.record_stride == 0 && !converged && !last_allowed) record(iter, err);
  }

  // Final record uses the explicitly evaluated error.
  {
    CpDecomposition cp;
    cp.A = a;
    cp.B = b;
    cp.C = c;
    cp.weights = weights;
    cp.normalized = false;
    const double exact = frobenius_norm(evaluate(cp) - z);
    record(iter, exact);
    try {
      trace.final_cp = normalize(cp);
    } catch (const degenerate_component_error&) {
      cp.normalized = false;
      trace.final_cp = cp;
    }
  }
  trace.iterations = iter;
  trace.termination = converged ? FitTrace::Termination::converged : FitTrace::Termination::max_iters;
  return trace;
}

struct SwampMetrics {
  double weight_growth_rate = 0;   // mean log-growth of max|w| per recorded step
  double fit_decay_rate = 0;       // mean log-decrease of the fit error per step
  double min_group_congruence = 0; // min pairwise |congruence| at the last record
};

/// Summary statistics over the last `window` records of a trace; a window
/// longer than the trace uses the whole trace.
inline SwampMetrics swamp_metrics(const FitTrace& trace, std::size_t window = 50) {
  if (trace.records.empty()) throw std::invalid_argument("swamp_metrics: empty trace");
  const std::size_t count = std::min(window, trace.records.size());
  const FitRecord& first = trace.records[trace.records.size() - count];
  const FitRecord& last = trace.records.back();
  SwampMetrics m;
  m.min_group_congruence = last.min_congruence();
  if (count < 2) return m;
  const double steps = static_cast<double>(count - 1);
  const double w0 = first.max_abs_weight(), w1 = last.max_abs_weight();
  if (w0 > 0.0 && w1 > 0.0 && w0 != w1) m.weight_growth_rate = (std::log(w1) - std::log(w0)) / steps;
  const double e0 = first.fit_error, e1 = last.fit_error;
  if (e0 > 0.0 && e1 > 0.0 && e0 != e1) m.fit_decay_rate = (std::log(e0) - std::log(e1)) / steps;
  return m;
}

}  // namespace cpd
