// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "cpdiverge/rng.hpp"
#include "cpdiverge/sgsd.hpp"

using namespace cpd;

namespace {

Tensor3 random_triangular_core(Rng& rng, int r, int k) {
  Tensor3 g(r, r, k);
  for (int slice = 0; slice < k; ++slice)
    for (int j = 0; j < r; ++j)
      for (int i = 0; i <= j; ++i) g(i, j, slice) = rng.gaussian();
  return g;
}

Matrix random_orthonormal(Rng& rng, int n, int r) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(n, r));
  return Matrix(qr.householderQ() * Matrix::Identity(n, r));
}

}  // namespace

TEST_CASE("sgsd_jacobi recovers wrapped triangular cores") {
  Rng rng(53);
  const std::pair<int, std::array<int, 3>> cases[] = {
      {3, {5, 6, 7}}, {4, {6, 6, 5}}, {6, {8, 9, 8}}, {3, {3, 3, 2}}, {4, {7, 9, 4}}};
  for (const auto& [r, dims] : cases) {
    const int kp = std::min(dims[2], r);
    const Tensor3 g0 = random_triangular_core(rng, r, kp);
    const Matrix l = random_orthonormal(rng, dims[0], r);
    const Matrix m = random_orthonormal(rng, dims[1], r);
    const Matrix n = random_orthonormal(rng, dims[2], kp);
    const Tensor3 x = multilinear_multiply(g0, l, m, n);
    const double nx = frobenius_norm(x);
    const SchurForm form = sgsd_jacobi(x, r);
    INFO("R=" << r << " dims " << dims[0] << "x" << dims[1] << "x" << dims[2]);
    CHECK(form.below_diag_residual < 1e-8 * nx);
    CHECK(form.reconstruction_error < 1e-8 * nx);
    CHECK((form.S.transpose() * form.S - Matrix::Identity(r, r)).norm() < 1e-10);
    CHECK((form.T.transpose() * form.T - Matrix::Identity(r, r)).norm() < 1e-10);
    CHECK((form.U.transpose() * form.U - Matrix::Identity(kp, kp)).norm() < 1e-10);
  }
}

TEST_CASE("sgsd_jacobi R=1 has no strictly-lower part") {
  Rng rng(59);
  Tensor3 x(4, 5, 3);
  for (double& v : x.values()) v = rng.gaussian();
  const SchurForm form = sgsd_jacobi(x, 1);
  CHECK(form.below_diag_residual == 0.0);
}

TEST_CASE("sgsd_jacobi objective is non-increasing in the sweep budget") {
  Rng rng(61);
  Tensor3 x(5, 5, 5);
  for (double& v : x.values()) v = rng.gaussian();  // generic tensor, inexact fit
  double prev = std::numeric_limits<double>::infinity();
  for (int sweeps : {0, 1, 2, 5, 20}) {
    SgsdOptions opts;
    opts.max_sweeps = sweeps;
    opts.tol = 0.0;
    const SchurForm form = sgsd_jacobi(x, 5, opts);
    REQUIRE(form.below_diag_residual <= prev + 1e-12);
    prev = form.below_diag_residual;
  }
}

TEST_CASE("sgsd_jacobi rejects R above min(I,J)") {
  Tensor3 x(2, 2, 2);
  x(0, 0, 0) = 1.0;
  REQUIRE_THROWS_AS(sgsd_jacobi(x, 3), std::invalid_argument);
}

TEST_CASE("find_nonsingular_slicemix") {
  Rng rng(67);
  SECTION("identity first slice is accepted immediately") {
    Tensor3 g(3, 3, 3);
    g.slice(0) = Matrix::Identity(3, 3);
    g.slice(1) = random_triangular_core(rng, 3, 1).slice(0);
    g.slice(2) = random_triangular_core(rng, 3, 1).slice(0);
    const auto mix = find_nonsingular_slicemix(g);
    REQUIRE(mix.has_value());
    const Tensor3 mixed = slicemix(g, *mix);
    Eigen::JacobiSVD<Matrix> svd(Matrix(mixed.slice(0)));
    CHECK(svd.singularValues()[0] / svd.singularValues()[2] <= 1e8);
    // mixing matrix is nonsingular
    CHECK(std::abs(mix->determinant()) > 1e-8);
  }
  SECTION("a shared zero diagonal position defeats every mix") {
    // all slices upper triangular with a zero at diagonal position 2
    Tensor3 g(3, 3, 3);
    for (int k = 0; k < 3; ++k) {
      Matrix s = random_triangular_core(rng, 3, 1).slice(0);
      s(1, 1) = 0.0;
      g.slice(k) = s;
    }
    CHECK_FALSE(find_nonsingular_slicemix(g).has_value());
  }
  SECTION("deterministic under seed") {
    Tensor3 g = random_triangular_core(rng, 4, 4);
    SlicemixOptions opts;
    opts.seed = 99;
    const auto m1 = find_nonsingular_slicemix(g, opts);
    const auto m2 = find_nonsingular_slicemix(g, opts);
    REQUIRE(m1.has_value());
    REQUIRE(m2.has_value());
    CHECK((*m1 - *m2).norm() == 0.0);
  }
}

TEST_CASE("normalize_first_slice") {
  Rng rng(71);
  SECTION("identity first slice stays identity") {
    Tensor3 g(3, 3, 2);
    g.slice(0) = Matrix::Identity(3, 3);
    g.slice(1) = random_triangular_core(rng, 3, 1).slice(0);
    const NormalizedCore nc = normalize_first_slice(g, Matrix::Identity(2, 2));
    CHECK((nc.core.slice(0) - Matrix::Identity(3, 3)).norm() < 1e-14);
    CHECK((nc.core.slice(1) - g.slice(1)).norm() < 1e-12);
  }
  SECTION("random triangular core and valid mix give identity first slice") {
    const Tensor3 g = random_triangular_core(rng, 4, 4);
    const auto mix = find_nonsingular_slicemix(g);
    REQUIRE(mix.has_value());
    const NormalizedCore nc = normalize_first_slice(g, *mix);
    CHECK((nc.core.slice(0) - Matrix::Identity(4, 4)).norm() < 1e-10);
    // triangularity preserved
    CHECK(nc.triangularity_residual < 1e-10 * frobenius_norm(nc.core));
  }
  SECTION("singular first slice rejected") {
    Tensor3 g(2, 2, 2);
    g.slice(1) = Matrix::Identity(2, 2);  // slice 0 stays zero
    REQUIRE_THROWS_AS(normalize_first_slice(g, Matrix::Identity(2, 2)), std::invalid_argument);
  }
  SECTION("3x3x2 core with constant-diagonal second slice keeps its entries") {
    // slices [I | [[a,0,f],[0,a,e],[0,0,a]]] are already normalized; the
    // identity mix must reproduce the displayed entries exactly
    const double a = 0.4, e = -1.3, f = 0.7;
    Tensor3 g(3, 3, 2);
    g.slice(0) = Matrix::Identity(3, 3);
    Matrix g2(3, 3);
    g2 << a, 0, f, 0, a, e, 0, 0, a;
    g.slice(1) = g2;
    const NormalizedCore nc = normalize_first_slice(g, Matrix::Identity(2, 2));
    CHECK((nc.core.slice(1) - g2).norm() < 1e-14);
  }
}

TEST_CASE("eigen_structure") {
  Rng rng(73);
  SECTION("distinct diagonal matches the closed forms after normalization") {
    const double a = 0.2, b = 1.1, c = -0.7, d = 0.9, e = -1.2, f = 0.5;
    Tensor3 g(3, 3, 2);
    g.slice(0) = Matrix::Identity(3, 3);
    Matrix g2(3, 3);
    g2 << a, d, f, 0, b, e, 0, 0, c;
    g.slice(1) = g2;
    const NormalizedCore nc = normalize_first_slice(g, Matrix::Identity(2, 2));
    const EigenStructure es = eigen_structure(nc);
    REQUIRE_FALSE(es.defective);
    CHECK(es.independent_eigenvectors == 3);
    const ClosedForm3x3 cf = closed_form_3x3(a, b, c, d, e, f);
    // both are scaled to first-nonzero-entry 1, so they agree entrywise
    CHECK((es.eigenvectors - cf.eigvecs).norm() < 1e-10 * cf.eigvecs.norm());
    CHECK(es.multiplicity_partition[0] == std::vector<int>{1, 1, 1});
    // C row 1 all ones, row 2 the slice diagonal
    CHECK((es.c_rows.row(0) - Eigen::RowVector3d::Ones()).norm() == 0.0);
    CHECK((es.c_rows.row(1) - Eigen::RowVector3d(a, b, c)).norm() == 0.0);
  }
  SECTION("triple eigenvalue with a two-dimensional eigenspace") {
    const double a = 0.8, e = 1.0, f = 1.0;
    Tensor3 g(3, 3, 2);
    g.slice(0) = Matrix::Identity(3, 3);
    Matrix g2(3, 3);
    g2 << a, 0, f, 0, a, e, 0, 0, a;
    g.slice(1) = g2;
    const EigenStructure es = eigen_structure(normalize_first_slice(g, Matrix::Identity(2, 2)));
    CHECK_FALSE(es.defective);  // every column satisfies the eigen-equation
    CHECK(es.multiplicity_partition[0] == std::vector<int>{3});
    CHECK(es.independent_eigenvectors == 2);
    CHECK_FALSE(es.inverse_exact);
  }
  SECTION("identity slice accepts any basis") {
    Tensor3 g(3, 3, 2);
    g.slice(0) = Matrix::Identity(3, 3);
    g.slice(1) = Matrix::Identity(3, 3);
    const EigenStructure es = eigen_structure(normalize_first_slice(g, Matrix::Identity(2, 2)));
    CHECK_FALSE(es.defective);
    CHECK(es.multiplicity_partition[0] == std::vector<int>{3});
    CHECK((es.c_rows.row(1) - Eigen::RowVector3d::Ones()).norm() == 0.0);
  }
  SECTION("slices that do not share eigenvectors are flagged") {
    Tensor3 g(3, 3, 3);
    g.slice(0) = Matrix::Identity(3, 3);
    Matrix g2(3, 3), g3(3, 3);
    g2 << 0.3, 0.9, 0.1, 0, 1.2, -0.4, 0, 0, -0.8;
    g3 << 1.0, -2.0, 0.6, 0, 0.1, 1.5, 0, 0, 0.9;  // unrelated eigenvectors
    g.slice(1) = g2;
    g.slice(2) = g3;
    const EigenStructure es = eigen_structure(normalize_first_slice(g, Matrix::Identity(3, 3)));
    CHECK(es.defective);
  }
  SECTION("eigen-equation residual stays within tolerance for shared structure") {
    // upper-triangular eigenvector matrix makes A D_k A^{-1} exactly triangular
    Matrix av = Matrix::Identity(3, 3);
    av(0, 1) = 0.7;
    av(0, 2) = -0.4;
    av(1, 2) = 1.1;
    Tensor3 g(3, 3, 3);
    g.slice(0) = Matrix::Identity(3, 3);
    const Vector d2 = rng.gaussian_vector(3), d3 = rng.gaussian_vector(3);
    g.slice(1) = av * d2.asDiagonal() * av.inverse();
    g.slice(2) = av * d3.asDiagonal() * av.inverse();
    const EigenStructure es = eigen_structure(normalize_first_slice(g, Matrix::Identity(3, 3)));
    CHECK_FALSE(es.defective);
    CHECK(es.max_validation_residual < 1e-8);
  }
}

TEST_CASE("closed_form_3x3") {
  SECTION("example values") {
    const ClosedForm3x3 cf = closed_form_3x3(0, 1, 2, 1, 1, 1);
    CHECK(cf.eigvecs(0, 1) == 1.0);
    CHECK(cf.eigvecs(1, 1) == 1.0);
    CHECK(cf.eigvecs(2, 1) == 0.0);
    CHECK(cf.b_raw(2, 1) == -1.0);
    // this tuple has d*e + f*(a-b) == 0, so column 1's third entry vanishes
    // and only the remaining columns can carry the third-entry scaling
    CHECK(cf.b_raw(2, 0) == 0.0);
    CHECK(cf.b_normalized(2, 1) == 1.0);
    CHECK(cf.b_normalized(2, 2) == 1.0);
  }
  SECTION("agrees with a general eigensolver on random admissible tuples") {
    Rng rng(79);
    int done = 0;
    while (done < 30) {
      const double a = rng.gaussian(), b = rng.gaussian(), c = rng.gaussian();
      const double d = rng.signed_magnitude(), e = rng.signed_magnitude(), f = rng.signed_magnitude();
      if (std::abs(a - b) < 1e-2 || std::abs(b - c) < 1e-2 || std::abs(a - c) < 1e-2) continue;
      if (std::abs(d * e + f * (c - b)) < 1e-2 || std::abs(d * e + f * (a - b)) < 1e-2) continue;
      Matrix y2(3, 3);
      y2 << a, d, f, 0, b, e, 0, 0, c;
      const ClosedForm3x3 cf = closed_form_3x3(a, b, c, d, e, f);
      // eigen-equation residual per eigenpair
      const Vector lams = (Vector(3) << a, b, c).finished();
      CHECK((y2 * cf.eigvecs - cf.eigvecs * lams.asDiagonal()).norm() < 1e-10 * y2.norm());
      // B matches A^{-T} exactly up to rounding
      CHECK((cf.b_raw - cf.eigvecs.inverse().transpose()).norm() < 1e-10 * cf.b_raw.norm());
      // cross-check eigenvalues against the general solver
      Eigen::EigenSolver<Matrix> gen(y2);
      Vector got = gen.eigenvalues().real();
      std::sort(got.data(), got.data() + 3);
      Vector want = lams;
      std::sort(want.data(), want.data() + 3);
      CHECK((got - want).norm() < 1e-10 * (1.0 + want.norm()));
      ++done;
    }
  }
  SECTION("rejects coincident eigenvalues and zero denominators") {
    REQUIRE_THROWS_AS(closed_form_3x3(1, 1, 2, 1, 1, 1), closed_form_undefined);
    REQUIRE_THROWS_AS(closed_form_3x3(0, 1, 2, 0, 1, 1), closed_form_undefined);
    // d*e + f*(c-b) == 0 with d,e,f nonzero: d=1,e=1,f=1,c-b=-1
    REQUIRE_THROWS_AS(closed_form_3x3(0, 2, 1, 1, 1, 1), closed_form_undefined);
  }
}
