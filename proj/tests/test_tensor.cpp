// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "cpdiverge/rng.hpp"
#include "cpdiverge/tensor.hpp"

using namespace cpd;

namespace {

// Brute-force contraction oracle for (S,T,U).G, independent of the
// slice-based implementation.
Tensor3 multilinear_reference(const Tensor3& g, const Matrix& s, const Matrix& t,
                              const Matrix& u) {
  Tensor3 y(static_cast<int>(s.rows()), static_cast<int>(t.rows()), static_cast<int>(u.rows()));
  for (int i = 0; i < y.dim1(); ++i)
    for (int j = 0; j < y.dim2(); ++j)
      for (int k = 0; k < y.dim3(); ++k) {
        double acc = 0.0;
        for (int r = 0; r < g.dim1(); ++r)
          for (int p = 0; p < g.dim2(); ++p)
            for (int q = 0; q < g.dim3(); ++q) acc += s(i, r) * t(j, p) * u(k, q) * g(r, p, q);
        y(i, j, k) = acc;
      }
  return y;
}

Tensor3 random_tensor(Rng& rng, int i, int j, int k) {
  Tensor3 t(i, j, k);
  for (double& v : t.values()) v = rng.gaussian();
  return t;
}

double rel_err(const Tensor3& a, const Tensor3& b) {
  return frobenius_norm(a - b) / std::max(frobenius_norm(b), 1e-300);
}

}  // namespace

TEST_CASE("rank1 outer product") {
  SECTION("1x1x1 identity case") {
    Vector one(1);
    one << 1.0;
    const Tensor3 t = rank1(one, one, one);
    REQUIRE(t.dim1() == 1);
    REQUIRE(t(0, 0, 0) == 1.0);
  }
  SECTION("unit vectors place a single slab") {
    Vector a(2), b(2), c(2);
    a << 1, 0;
    b << 0, 1;
    c << 1, 1;
    const Tensor3 t = rank1(a, b, c);
    CHECK(t(0, 1, 0) == 1.0);
    CHECK(t(0, 1, 1) == 1.0);
    double sum = 0;
    for (double v : t.values()) sum += std::abs(v);
    CHECK(sum == 2.0);
  }
  SECTION("matches brute-force triple loop exactly") {
    Rng rng(7);
    const Vector a = rng.gaussian_vector(3), b = rng.gaussian_vector(4), c = rng.gaussian_vector(2);
    const Tensor3 t = rank1(a, b, c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 2; ++k) REQUIRE(t(i, j, k) == a[i] * b[j] * c[k]);
  }
  SECTION("empty vector rejected") {
    REQUIRE_THROWS_AS(rank1(Vector(), Vector::Ones(2), Vector::Ones(2)), std::invalid_argument);
  }
}

TEST_CASE("multilinear_multiply") {
  Rng rng(11);
  SECTION("identity factors reproduce the core") {
    const Tensor3 g = random_tensor(rng, 3, 4, 2);
    const Tensor3 y = multilinear_multiply(g, Matrix::Identity(3, 3), Matrix::Identity(4, 4),
                                           Matrix::Identity(2, 2));
    CHECK(rel_err(y, g) == 0.0);
  }
  SECTION("all-scalar case") {
    Tensor3 g(1, 1, 1);
    g(0, 0, 0) = 2.5;
    Matrix s(1, 1), t(1, 1), u(1, 1);
    s << 3.0;
    t << -1.0;
    u << 0.5;
    CHECK(multilinear_multiply(g, s, t, u)(0, 0, 0) == Catch::Approx(2.5 * 3.0 * -1.0 * 0.5));
  }
  SECTION("matches brute force on random instances") {
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor3 g = random_tensor(rng, 3, 3, 3);
      const Matrix s = rng.gaussian_matrix(4, 3), t = rng.gaussian_matrix(4, 3),
                   u = rng.gaussian_matrix(4, 3);
      const Tensor3 y = multilinear_multiply(g, s, t, u);
      const Tensor3 ref = multilinear_reference(g, s, t, u);
      REQUIRE(rel_err(y, ref) < 1e-12);
    }
  }
  SECTION("composition property") {
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor3 g = random_tensor(rng, 2, 3, 2);
      const Matrix s1 = rng.gaussian_matrix(4, 3), s2 = rng.gaussian_matrix(3, 2);
      const Matrix t1 = rng.gaussian_matrix(5, 4), t2 = rng.gaussian_matrix(4, 3);
      const Matrix u1 = rng.gaussian_matrix(3, 3), u2 = rng.gaussian_matrix(3, 2);
      const Tensor3 once = multilinear_multiply(g, Matrix(s1 * s2), Matrix(t1 * t2), Matrix(u1 * u2));
      const Tensor3 twice = multilinear_multiply(multilinear_multiply(g, s2, t2, u2), s1, t1, u1);
      REQUIRE(rel_err(once, twice) < 1e-10);
    }
  }
  SECTION("orthonormal factors preserve the norm") {
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor3 g = random_tensor(rng, 3, 3, 3);
      auto orth = [&rng](int n, int r) {
        Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(n, r));
        return Matrix(qr.householderQ() * Matrix::Identity(n, r));
      };
      const Tensor3 y = multilinear_multiply(g, orth(6, 3), orth(5, 3), orth(4, 3));
      REQUIRE(frobenius_norm(y) == Catch::Approx(frobenius_norm(g)).epsilon(1e-10));
    }
  }
  SECTION("dimension mismatch rejected") {
    const Tensor3 g = random_tensor(rng, 3, 3, 3);
    REQUIRE_THROWS_AS(
        multilinear_multiply(g, Matrix::Identity(3, 2), Matrix::Identity(3, 3), Matrix::Identity(3, 3)),
        std::invalid_argument);
  }
}

TEST_CASE("slicemix") {
  Rng rng(13);
  const Tensor3 g = random_tensor(rng, 3, 4, 3);
  SECTION("identity leaves slices unchanged") {
    CHECK(rel_err(slicemix(g, Matrix::Identity(3, 3)), g) == 0.0);
  }
  SECTION("row swap exchanges slices") {
    Matrix p(2, 2);
    p << 0, 1, 1, 0;
    const Tensor3 h = random_tensor(rng, 2, 2, 2);
    const Tensor3 m = slicemix(h, p);
    CHECK((m.slice(0) - h.slice(1)).norm() == 0.0);
    CHECK((m.slice(1) - h.slice(0)).norm() == 0.0);
  }
  SECTION("equals the direct slice linear combination and the multilinear route") {
    const Matrix u = rng.gaussian_matrix(4, 3);
    const Tensor3 m = slicemix(g, u);
    for (int k = 0; k < 4; ++k) {
      Matrix ref = Matrix::Zero(3, 4);
      for (int q = 0; q < 3; ++q) ref += u(k, q) * g.slice(q);
      REQUIRE((m.slice(k) - ref).norm() < 1e-12 * ref.norm());
    }
    const Tensor3 via = multilinear_multiply(g, Matrix::Identity(3, 3), Matrix::Identity(4, 4), u);
    CHECK(rel_err(m, via) < 1e-14);
  }
  SECTION("wrong column count rejected") {
    REQUIRE_THROWS_AS(slicemix(g, Matrix::Identity(2, 2)), std::invalid_argument);
  }
}

TEST_CASE("frobenius_norm") {
  CHECK(frobenius_norm(Tensor3(2, 3, 4)) == 0.0);
  Tensor3 t(2, 2, 2);
  t(1, 0, 1) = 3.0;
  CHECK(frobenius_norm(t) == 3.0);
  Rng rng(17);
  const Tensor3 y = random_tensor(rng, 4, 3, 5);
  CHECK(frobenius_norm(y) == Catch::Approx(unfold(y, 1).norm()).epsilon(1e-14));
}

TEST_CASE("unfold and refold") {
  Rng rng(19);
  SECTION("1x1x1") {
    Tensor3 t(1, 1, 1);
    t(0, 0, 0) = 4.0;
    for (int mode : {1, 2, 3}) {
      const Matrix m = unfold(t, mode);
      REQUIRE(m.rows() == 1);
      REQUIRE(m(0, 0) == 4.0);
    }
  }
  SECTION("rank-1 tensor unfolds to a rank-1 matrix") {
    const Tensor3 t = rank1(rng.gaussian_vector(3), rng.gaussian_vector(4), rng.gaussian_vector(2));
    CHECK(numerical_rank(unfold(t, 1)) == 1);
  }
  SECTION("round-trip is bit-identical") {
    const Tensor3 y = random_tensor(rng, 3, 5, 4);
    for (int mode : {1, 2, 3}) {
      const Tensor3 back = refold(unfold(y, mode), mode, 3, 5, 4);
      REQUIRE(back.values() == y.values());
    }
  }
  SECTION("documented column order") {
    Tensor3 y(2, 3, 2);
    int c = 0;
    for (double& v : y.values()) v = c++;
    const Matrix m1 = unfold(y, 1);
    // column j + J*k holds fiber y(:, j, k)
    CHECK(m1(0, 1 + 3 * 1) == y(0, 1, 1));
    const Matrix m2 = unfold(y, 2);
    CHECK(m2(2, 1 + 2 * 1) == y(1, 2, 1));
    const Matrix m3 = unfold(y, 3);
    CHECK(m3(1, 1 + 2 * 2) == y(1, 2, 1));
  }
  SECTION("bad mode rejected") {
    const Tensor3 y = random_tensor(rng, 2, 2, 2);
    REQUIRE_THROWS_AS(unfold(y, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(unfold(y, 4), std::invalid_argument);
  }
}

TEST_CASE("numerical_rank") {
  CHECK(numerical_rank(Matrix::Identity(3, 3)) == 3);
  Rng rng(23);
  const Vector u = rng.gaussian_vector(4), v = rng.gaussian_vector(5);
  CHECK(numerical_rank(Matrix(u * v.transpose())) == 1);
  CHECK(numerical_rank(Matrix::Zero(3, 4)) == 0);
  Matrix limit(3, 3);
  limit << 1, 0, 1, 0, 1, 1.0 / 3.0, 0, 0, 0;
  CHECK(numerical_rank(limit) == 2);
  REQUIRE_THROWS_AS(numerical_rank(limit, 0.0), std::invalid_argument);
}

TEST_CASE("mode_rank") {
  Rng rng(29);
  SECTION("rank-1 tensor has mode ranks (1,1,1)") {
    const Tensor3 t = rank1(rng.gaussian_vector(3), rng.gaussian_vector(3), rng.gaussian_vector(3));
    CHECK(mode_rank(t, 1) == 1);
    CHECK(mode_rank(t, 2) == 1);
    CHECK(mode_rank(t, 3) == 1);
  }
  SECTION("invariant under nonsingular mode multiplication") {
    for (int trial = 0; trial < 3; ++trial) {
      const Tensor3 y = random_tensor(rng, 3, 4, 3);
      Matrix s = rng.gaussian_matrix(3, 3), t = rng.gaussian_matrix(4, 4), u = rng.gaussian_matrix(3, 3);
      // gaussian square matrices are nonsingular with probability 1
      const Tensor3 m = multilinear_multiply(y, s, t, u);
      for (int mode : {1, 2, 3}) REQUIRE(mode_rank(m, mode) == mode_rank(y, mode));
    }
  }
}

TEST_CASE("Tensor3 construction guards") {
  REQUIRE_THROWS_AS(Tensor3(0, 1, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(Tensor3(2, 2, 2, std::vector<double>(7, 0.0)), std::invalid_argument);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(Tensor3(2, 2, 2, bad), std::invalid_argument);
}
