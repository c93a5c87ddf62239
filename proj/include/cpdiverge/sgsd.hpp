// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cpdiverge/errors.hpp"
#include "cpdiverge/rng.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

struct SgsdOptions {
  int max_sweeps = 200;
  double tol = 1e-12;  // relative objective change per sweep
};

/// Simultaneous generalized Schur form of a tensor: column-wise orthonormal
/// S, T, U and core G = (S^T, T^T, U^T) . X whose frontal slices are all
/// upper triangular up to below_diag_residual.
struct SchurForm {
  Matrix S, T, U;                  // I x R, J x R, K x K'
  Tensor3 G;                       // R x R x K', K' = min(K, R)
  double below_diag_residual = 0;  // Frobenius norm of strictly-lower parts
  double reconstruction_error = 0; // ||(S,T,U).G - X||
  int sweeps = 0;
  bool converged = false;
};

namespace detail {

/// Orthogonal H (d x d) with H e1 = w, for unit w.
inline Matrix householder_from_e1(const Vector& w) {
  const int d = static_cast<int>(w.size());
  Vector v = w;
  double sign = 1.0;
  if (w[0] >= 0.0) {
    v[0] += 1.0;
    sign = -1.0;  // P maps w -> -e1, so use -P
  } else {
    v[0] -= 1.0;
  }
  const double vn2 = v.squaredNorm();
  if (vn2 < 1e-300) return Matrix::Identity(d, d);
  Matrix h = Matrix::Identity(d, d) - (2.0 / vn2) * (v * v.transpose());
  return sign < 0.0 ? Matrix(-h) : h;
}

/// Unit eigenvector (c, s) of the smallest eigenvalue of [[m11,m12],[m12,m22]],
/// sign-fixed so c >= 0.
inline void min_eigvec2(double m11, double m12, double m22, double& c, double& s) {
  const double diff = m11 - m22;
  const double disc = std::hypot(diff, 2.0 * m12);
  const double lam = 0.5 * (m11 + m22 - disc);
  const double ax = m12, ay = lam - m11;
  const double bx = lam - m22, by = m12;
  double x, y;
  if (ax * ax + ay * ay >= bx * bx + by * by) {
    x = ax;
    y = ay;
  } else {
    x = bx;
    y = by;
  }
  const double n = std::hypot(x, y);
  if (n < 1e-300) {
    c = 1.0;
    s = 0.0;
    return;
  }
  c = x / n;
  s = y / n;
  if (c < 0.0) {
    c = -c;
    s = -s;
  }
}

inline double lower_triangular_mass(const Tensor3& g) {
  double m = 0.0;
  for (int k = 0; k < g.dim3(); ++k)
    for (int j = 0; j < g.dim2(); ++j)
      for (int i = j + 1; i < g.dim1(); ++i) m += g(i, j, k) * g(i, j, k);
  return m;
}

/// One cyclic Jacobi sweep over all index pairs: for each (p, q) apply the
/// row rotation and then the column rotation minimizing the strictly-lower
/// mass contribution in closed form. Rotations accumulate into S and T.
inline void jacobi_sweep(Tensor3& g, Matrix& s_acc, Matrix& t_acc) {
  const int R = g.dim1();
  const int K = g.dim3();
  for (int p = 0; p < R - 1; ++p) {
    for (int q = p + 1; q < R; ++q) {
      // Row rotation: entries (q, j), j in [p, q-1] are the affected lower part.
      double m11 = 0, m12 = 0, m22 = 0;
      for (int k = 0; k < K; ++k)
        for (int j = p; j < q; ++j) {
          const double a = g(p, j, k), b = g(q, j, k);
          m11 += b * b;
          m22 += a * a;
          m12 -= a * b;
        }
      double c, sn;
      min_eigvec2(m11, m12, m22, c, sn);
      if (std::abs(sn) > 0.0) {
        for (int k = 0; k < K; ++k) {
          auto gk = g.slice(k);
          const Eigen::RowVectorXd rp = c * gk.row(p) + sn * gk.row(q);
          gk.row(q) = -sn * gk.row(p) + c * gk.row(q);
          gk.row(p) = rp;
        }
        const Vector sp = c * s_acc.col(p) + sn * s_acc.col(q);
        s_acc.col(q) = -sn * s_acc.col(p) + c * s_acc.col(q);
        s_acc.col(p) = sp;
      }
      // Column rotation: entries (i, p), i in [p+1, q] are the affected lower part.
      double n11 = 0, n12 = 0, n22 = 0;
      for (int k = 0; k < K; ++k)
        for (int i = p + 1; i <= q; ++i) {
          const double a = g(i, p, k), b = g(i, q, k);
          n11 += a * a;
          n22 += b * b;
          n12 += a * b;
        }
      min_eigvec2(n11, n12, n22, c, sn);
      if (std::abs(sn) > 0.0) {
        for (int k = 0; k < K; ++k) {
          auto gk = g.slice(k);
          const Vector cp = c * gk.col(p) + sn * gk.col(q);
          gk.col(q) = -sn * gk.col(p) + c * gk.col(q);
          gk.col(p) = cp;
        }
        const Vector tp = c * t_acc.col(p) + sn * t_acc.col(q);
        t_acc.col(q) = -sn * t_acc.col(p) + c * t_acc.col(q);
        t_acc.col(p) = tp;
      }
    }
  }
}

/// Deterministic staircase triangularization of an R x R x K' core.
///
/// At each deflation step the pencil of two fixed generic slice mixes yields
/// candidate right vectors (generalized eigenvectors); the candidate mapped
/// by every slice into a single common direction is extracted, preferring the
/// one with the largest image among those that fit. Householder reflections
/// push the pair (image, vector) to the leading position, the leading
/// row/column deflate, and the process recurses. Exact for cores that admit
/// an exact triangular form; the Jacobi sweeps afterwards polish the rest.
inline void staircase_triangularize(Tensor3& h, Matrix& s_acc, Matrix& t_acc) {
  const int R = h.dim1();
  const int K = h.dim3();
  Rng rng(0x9e3779b97f4a7c15ull);
  double scale2 = 0.0;
  for (double v : h.values()) scale2 += v * v;
  // Candidates scored as rank-1-image residuals are "valid" only near machine
  // precision: for repeated-eigenvalue cores the residual is quartically flat
  // around the true flag vector, so a loose threshold would accept vectors
  // that are well off it.
  const double valid2 = 1e-26 * scale2;

  for (int m = 0; m + 1 < R; ++m) {
    const int d = R - m;
    std::vector<Matrix> sub(K);
    for (int k = 0; k < K; ++k) sub[k] = h.slice(k).block(m, m, d, d);
    const Vector u = rng.unit_vector(K);
    const Vector v2 = rng.unit_vector(K);
    Matrix m1 = Matrix::Zero(d, d), m2 = Matrix::Zero(d, d);
    for (int k = 0; k < K; ++k) {
      m1 += u[k] * sub[k];
      m2 += v2[k] * sub[k];
    }

    std::vector<Vector> cands;
    Eigen::RealQZ<Matrix> qz(m1, m2);
    // When a pencil has a multidimensional near-null space, the flag vector
    // is some combination of its basis vectors; sample the circle spanned by
    // the two smallest singular vectors and let the refinement below finish.
    auto add_null_candidates = [&cands, d](const Matrix& pencil) {
      Eigen::JacobiSVD<Matrix> svd(pencil, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      cands.push_back(svd.matrixV().col(d - 1));
      if (d > 1 && sv[d - 2] < 1e-7 * std::max(sv[0], 1e-300)) {
        for (int t = 1; t < 16; ++t) {
          const double theta = t * 3.14159265358979323846 / 16.0;
          cands.push_back(std::cos(theta) * svd.matrixV().col(d - 1) +
                          std::sin(theta) * svd.matrixV().col(d - 2));
        }
      }
    };
    {
      int i = 0;
      const Matrix& sm = qz.matrixS();
      const Matrix& tm = qz.matrixT();
      while (qz.info() == Eigen::Success && i < d) {
        if (i + 1 < d &&
            std::abs(sm(i + 1, i)) > 1e-12 * (std::abs(sm(i, i)) + std::abs(sm(i + 1, i + 1)) + 1e-300)) {
          i += 2;  // complex pair
          continue;
        }
        double alpha = sm(i, i), beta = tm(i, i);
        const double sc = std::hypot(alpha, beta);
        if (sc > 0.0) add_null_candidates(Matrix((beta / sc) * m1 - (alpha / sc) * m2));
        ++i;
      }
    }
    // Repeated-eigenvalue pencils: the shared eigenvalue is recovered exactly
    // as tr(M2^{-1} M1) / d (the non-scalar part is nilpotent, hence
    // traceless), and the kernel of M1 - lambda M2 locates the flag vector
    // even where the QZ diagonal is fuzzy.
    auto add_trace_candidates = [&](const Matrix& ma, const Matrix& mb) {
      Eigen::PartialPivLU<Matrix> lu(mb);
      const double lambda = lu.solve(ma).trace() / static_cast<double>(d);
      if (!std::isfinite(lambda)) return;
      add_null_candidates(Matrix(ma - lambda * mb));
    };
    add_trace_candidates(m1, m2);
    add_trace_candidates(m2, m1);
    for (int j = 0; j < d; ++j) cands.push_back(Vector::Unit(d, j));

    double best_resid2 = std::numeric_limits<double>::infinity();
    double best_image = -1.0;
    Vector best_w, best_v;
    bool have_valid = false;
    Matrix img(d, K);
    Matrix stacked(static_cast<Eigen::Index>(d) * K, d);
    for (const Vector& cand : cands) {
      const double wn = cand.norm();
      if (wn < 1e-14) continue;
      Vector w = cand / wn;
      Vector v;
      double resid2 = std::numeric_limits<double>::infinity();
      double image = 0.0;
      // Alternating refinement: the pencil only locates the candidate to the
      // accuracy of its (possibly defective) eigenvalues, so polish it as a
      // joint rank-1-image problem, alternating between the common image
      // direction v and the right vector w. Keep the best pass: a step of the
      // alternation may wander off an already machine-exact candidate.
      Vector w_cur = w;
      for (int pass = 0; pass < 4; ++pass) {
        for (int k = 0; k < K; ++k) img.col(k) = sub[k] * w_cur;
        Eigen::JacobiSVD<Matrix> svd(img, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        double r2 = 0.0;
        for (Eigen::Index t = 1; t < sv.size(); ++t) r2 += sv[t] * sv[t];
        if (r2 < resid2) {
          resid2 = r2;
          image = sv[0];
          v = svd.matrixU().col(0);
          w = w_cur;
        }
        if (resid2 <= 1e-30 * scale2) break;
        for (int k = 0; k < K; ++k)
          stacked.middleRows(static_cast<Eigen::Index>(k) * d, d) =
              sub[k] - v * (v.transpose() * sub[k]);
        Eigen::JacobiSVD<Matrix> wsvd(stacked, Eigen::ComputeFullV);
        w_cur = wsvd.matrixV().col(d - 1);
      }
      const bool valid = resid2 <= valid2;
      // Among valid candidates prefer the largest image (canonical ordering:
      // dominant generalized eigenvalues first); near-equal images are broken
      // by the sharper residual, since degenerate structures produce whole
      // families of near-valid vectors with indistinguishable images.
      bool take;
      if (valid) {
        take = !have_valid || image > best_image * (1.0 + 1e-6) ||
               (image > best_image * (1.0 - 1e-6) && resid2 < best_resid2);
      } else {
        take = !have_valid && resid2 < best_resid2;
      }
      if (take) {
        best_resid2 = resid2;
        best_image = image;
        best_w = w;
        best_v = v;
        have_valid = have_valid || valid;
      }
    }

    const Matrix hz = householder_from_e1(best_w);
    const Matrix hq = householder_from_e1(best_v);
    for (int k = 0; k < K; ++k) {
      auto gk = h.slice(k);
      gk.block(m, m, d, d) = hq.transpose() * Matrix(gk.block(m, m, d, d)) * hz;
      if (m > 0) {
        gk.block(0, m, m, d) = Matrix(gk.block(0, m, m, d)) * hz;
        gk.block(m, 0, d, m) = hq.transpose() * Matrix(gk.block(m, 0, d, m));
      }
    }
    s_acc.rightCols(d) = Matrix(s_acc.rightCols(d)) * hq;
    t_acc.rightCols(d) = Matrix(t_acc.rightCols(d)) * hz;
  }
}

inline Matrix leading_singular_basis(const Matrix& m, int r) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(r);
}

}  // namespace detail

/// Compute a simultaneous generalized Schur form of X with an R x R x min(K,R)
/// core. The mode subspaces come from the leading singular bases of the
/// unfoldings; the core is triangularized by the staircase extraction and then
/// refined with cyclic Jacobi sweeps (monotone objective).
inline SchurForm sgsd_jacobi(const Tensor3& x, int r, SgsdOptions opts = {}) {
  if (r < 1 || r > std::min(x.dim1(), x.dim2()))
    throw std::invalid_argument("sgsd_jacobi: need 1 <= R <= min(I, J)");
  const int kp = std::min(x.dim3(), r);

  Matrix s0 = detail::leading_singular_basis(unfold(x, 1), r);
  Matrix t0 = detail::leading_singular_basis(unfold(x, 2), r);
  Matrix u0 = detail::leading_singular_basis(unfold(x, 3), kp);

  Tensor3 g = multilinear_multiply(x, s0.transpose(), t0.transpose(), u0.transpose());
  Matrix q = Matrix::Identity(r, r), z = Matrix::Identity(r, r);
  detail::staircase_triangularize(g, q, z);

  double scale2 = 0.0;
  for (double v : g.values()) scale2 += v * v;
  double obj = detail::lower_triangular_mass(g);
  bool converged = obj <= 1e-28 * std::max(scale2, 1e-300);
  int sweeps = 0;
  while (!converged && sweeps < opts.max_sweeps) {
    detail::jacobi_sweep(g, q, z);
    ++sweeps;
    const double next = detail::lower_triangular_mass(g);
    if (next <= 1e-28 * std::max(scale2, 1e-300) ||
        obj - next <= opts.tol * std::max(obj, 1e-300))
      converged = true;
    obj = next;
  }

  SchurForm form{Matrix(s0 * q), Matrix(t0 * z), std::move(u0), std::move(g)};
  form.below_diag_residual = std::sqrt(detail::lower_triangular_mass(form.G));
  form.reconstruction_error =
      frobenius_norm(multilinear_multiply(form.G, form.S, form.T, form.U) - x);
  form.sweeps = sweeps;
  form.converged = converged;
  return form;
}

struct SlicemixOptions {
  int attempts = 64;
  double cond_cap = 1e8;
  std::uint64_t seed = 41;
};

/// Search for a nonsingular mixing matrix whose first mixed slice is
/// well-conditioned: coordinate slices first, then seeded random mixtures.
/// The returned matrix is orthogonal with the winning mix as its first row;
/// nullopt when every candidate's first slice has condition number above
/// cond_cap (or no candidate has usable scale).
inline std::optional<Matrix> find_nonsingular_slicemix(const Tensor3& g,
                                                       SlicemixOptions opts = {}) {
  if (g.dim1() != g.dim2()) throw std::invalid_argument("find_nonsingular_slicemix: slices must be square");
  const int kc = g.dim3();
  const double scale = frobenius_norm(g);
  Rng rng(opts.seed);

  double best_cond = std::numeric_limits<double>::infinity();
  Vector best_w;
  auto consider = [&](const Vector& w) {
    Matrix m = Matrix::Zero(g.dim1(), g.dim2());
    for (int k = 0; k < kc; ++k) m += w[k] * g.slice(k);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s[0] < 1e-8 * std::max(scale, 1e-300)) return;  // mix has no usable scale
    const double smin = s[s.size() - 1];
    const double cond = smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
    if (cond < best_cond) {
      best_cond = cond;
      best_w = w;
    }
  };

  for (int k = 0; k < kc; ++k) consider(Vector::Unit(kc, k));
  for (int t = 0; t < opts.attempts; ++t) consider(rng.unit_vector(kc));

  if (!(best_cond <= opts.cond_cap)) return std::nullopt;
  return Matrix(detail::householder_from_e1(best_w).transpose());
}

/// Core after mixing and premultiplying by the inverse of the first mixed
/// slice: slice 1 is the identity, the remaining slices stay upper triangular
/// when the input slices are (inverse of upper triangular is upper triangular).
struct NormalizedCore {
  Tensor3 core;
  Matrix mix;                  // slice mixing matrix applied first
  Matrix first_slice_inverse;  // inverse used for the premultiplication
  double triangularity_residual = 0;  // strictly-lower mass of the result
};

inline NormalizedCore normalize_first_slice(const Tensor3& g, const Matrix& mix) {
  if (mix.rows() != mix.cols() || mix.cols() != g.dim3())
    throw std::invalid_argument("normalize_first_slice: mix must be square with dim3 columns");
  Tensor3 mixed = slicemix(g, mix);
  const Matrix m1 = mixed.slice(0);
  Eigen::JacobiSVD<Matrix> svd(m1);
  const auto& s = svd.singularValues();
  if (s[s.size() - 1] <= 1e-13 * std::max(s[0], 1e-300))
    throw std::invalid_argument("normalize_first_slice: first mixed slice is singular");
  Eigen::PartialPivLU<Matrix> lu(m1);
  NormalizedCore out{Tensor3(g.dim1(), g.dim2(), g.dim3()), mix, lu.inverse()};
  for (int k = 0; k < g.dim3(); ++k) out.core.slice(k) = lu.solve(Matrix(mixed.slice(k)));
  out.triangularity_residual = std::sqrt(detail::lower_triangular_mass(out.core));
  return out;
}

struct EigenOptions {
  double coincidence_tol = 1e-6;  // relative eigenvalue coincidence grouping
  double validation_tol = 1e-8;   // per-slice eigen-equation residual
  double rank_tol = 1e-8;         // kernel extraction and eigenvector count
};

/// Joint eigenstructure of a normalized core: eigenvalues are the diagonals
/// of the triangular slices, the shared eigenvector matrix comes from slice 2,
/// all later slices are validated against it.
struct EigenStructure {
  std::vector<Vector> slice_eigenvalues;            // slices 2..K'
  std::vector<std::vector<int>> multiplicity_partition;  // per slice, sizes descending
  Matrix eigenvectors;        // columns scaled so the first nonzero entry is 1
  Matrix inverse_transpose;   // A^{-T} (pseudo-inverse transpose if A singular)
  Matrix c_rows;              // K' x R; row 1 all ones, row k = diag of slice k
  bool defective = false;     // some column fails the eigen-equation on some slice
  int independent_eigenvectors = 0;  // numerical rank of the eigenvector matrix
  bool inverse_exact = true;
  double max_validation_residual = 0;  // relative, over slices
};

namespace detail {

inline std::vector<std::vector<int>> coincidence_clusters(const Vector& d, double tol,
                                                          double scale_floor) {
  const int n = static_cast<int>(d.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  double scale = scale_floor;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
  const double gap = tol * std::max(scale, 1e-300);
  std::vector<std::vector<int>> clusters;
  for (int t = 0; t < n; ++t) {
    if (t == 0 || d[order[t]] - d[order[t - 1]] > gap) clusters.emplace_back();
    clusters.back().push_back(order[t]);
  }
  return clusters;
}

inline void scale_first_nonzero_to_one(Matrix& a) {
  for (int c = 0; c < a.cols(); ++c) {
    const double mx = a.col(c).cwiseAbs().maxCoeff();
    if (mx == 0.0) continue;
    for (int i = 0; i < a.rows(); ++i) {
      if (std::abs(a(i, c)) > 1e-10 * mx) {
        a.col(c) /= a(i, c);
        break;
      }
    }
  }
}

}  // namespace detail

inline EigenStructure eigen_structure(const NormalizedCore& nc, EigenOptions opts = {}) {
  const Tensor3& g = nc.core;
  const int r = g.dim1();
  const int kc = g.dim3();
  if (kc < 2) throw std::invalid_argument("eigen_structure: core needs at least two slices");

  EigenStructure out;
  out.c_rows = Matrix::Zero(kc, r);
  out.c_rows.row(0).setOnes();
  for (int k = 1; k < kc; ++k) {
    Vector d(r);
    for (int i = 0; i < r; ++i) d[i] = g(i, i, k);
    out.c_rows.row(k) = d.transpose();
    out.slice_eigenvalues.push_back(d);
    // coincidence scale includes the slice norm so an all-zero diagonal
    // clusters as one group instead of R singletons
    auto clusters = detail::coincidence_clusters(d, opts.coincidence_tol, g.slice(k).norm());
    std::vector<int> sizes;
    for (const auto& c : clusters) sizes.push_back(static_cast<int>(c.size()));
    std::sort(sizes.rbegin(), sizes.rend());
    out.multiplicity_partition.push_back(std::move(sizes));
  }

  // Shared eigenvector matrix from slice 2, one column per diagonal position.
  const Matrix g2 = g.slice(1);
  const Vector& d2 = out.slice_eigenvalues[0];
  const double g2scale = std::max(g2.norm(), 1e-300);
  Matrix a(r, r);
  for (const auto& cluster : detail::coincidence_clusters(d2, opts.coincidence_tol, g2scale)) {
    double center = 0.0;
    for (int i : cluster) center += d2[i];
    center /= static_cast<double>(cluster.size());
    const Matrix n = g2 - center * Matrix::Identity(r, r);
    Eigen::JacobiSVD<Matrix> svd(n, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int kernel_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] <= opts.rank_tol * g2scale) ++kernel_dim;
    if (kernel_dim == 0) kernel_dim = 1;  // take the best available direction
    const Matrix basis = svd.matrixV().rightCols(kernel_dim);
    for (std::size_t t = 0; t < cluster.size(); ++t) {
      Vector col;
      if (t < static_cast<std::size_t>(kernel_dim)) {
        col = basis.col(static_cast<Eigen::Index>(t));
      } else if (kernel_dim == 1) {
        col = basis.col(0);
      } else {
        const double mixc = static_cast<double>(t - kernel_dim + 1);
        col = (basis.col(0) + mixc * basis.col(1)).normalized();
      }
      a.col(cluster[t]) = col;
    }
  }
  detail::scale_first_nonzero_to_one(a);
  out.eigenvectors = a;

  double worst = 0.0;
  for (int k = 1; k < kc; ++k) {
    const Matrix gk = g.slice(k);
    const Vector& dk = out.slice_eigenvalues[static_cast<std::size_t>(k - 1)];
    const double resid = (gk * a - a * dk.asDiagonal()).norm() / std::max(gk.norm(), 1e-300);
    worst = std::max(worst, resid);
  }
  out.max_validation_residual = worst;
  out.defective = worst > opts.validation_tol;
  out.independent_eigenvectors = numerical_rank(a, opts.rank_tol);

  if (out.independent_eigenvectors == r) {
    out.inverse_transpose = a.inverse().transpose();
    out.inverse_exact = true;
  } else {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > opts.rank_tol * std::max(sv[0], 1e-300)) inv[i] = 1.0 / sv[i];
    out.inverse_transpose = (svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose()).transpose();
    out.inverse_exact = false;
  }
  return out;
}

/// Closed-form joint eigenvectors of the normalized 3 x 3 x K' core with
/// slice-2 entries [[a, d, f], [0, b, e], [0, 0, c]], valid for pairwise
/// distinct a, b, c with d, e and d*e + f*(c-b) nonzero.
struct ClosedForm3x3 {
  Eigen::Matrix3d eigvecs;       // eigenvector columns for eigenvalues a, b, c
  Eigen::Matrix3d b_raw;         // columns of (eigvecs)^{-T}
  Eigen::Matrix3d b_normalized;  // b_raw columns scaled to third entry 1;
                                 // a column with an exactly zero third entry
                                 // is left as in b_raw
};

inline ClosedForm3x3 closed_form_3x3(double a, double b, double c, double d, double e,
                                     double f) {
  if (a == b || b == c || a == c)
    throw closed_form_undefined("closed_form_3x3: coincident eigenvalues");
  const double den_c = d * e + f * (c - b);
  if (d == 0.0 || e == 0.0 || den_c == 0.0)
    throw closed_form_undefined("closed_form_3x3: zero denominator");

  ClosedForm3x3 out;
  out.eigvecs << 1.0, 1.0, 1.0,
      0.0, (b - a) / d, e * (c - a) / den_c,
      0.0, 0.0, (c - a) * (c - b) / den_c;
  const double den_a = d * e + f * (a - b);
  out.b_raw << 1.0, 0.0, 0.0,
      d / (a - b), d / (b - a), 0.0,
      den_a / ((a - b) * (a - c)), d * e / ((a - b) * (c - b)), den_c / ((c - a) * (c - b));
  for (int col = 0; col < 3; ++col) {
    const double third = out.b_raw(2, col);
    out.b_normalized.col(col) = third != 0.0 ? Eigen::Vector3d(out.b_raw.col(col) / third)
                                             : Eigen::Vector3d(out.b_raw.col(col));
  }
  return out;
}

}  // namespace cpd
