// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "cpdiverge/io.hpp"
#include "cpdiverge/rng.hpp"

using namespace cpd;

TEST_CASE("tensor json round-trip is lossless") {
  Rng rng(139);
  Tensor3 t(3, 4, 2);
  for (double& v : t.values()) v = rng.gaussian() * std::pow(10.0, rng.gaussian() * 3.0);
  const Tensor3 back = tensor_from_json(nlohmann::json::parse(tensor_to_json(t).dump()));
  CHECK(back.values() == t.values());
  CHECK(back.dim1() == 3);
  CHECK(back.dim2() == 4);
  CHECK(back.dim3() == 2);
}

TEST_CASE("tensor json validation") {
  CHECK_THROWS_AS(tensor_from_json(nlohmann::json{{"dims", {2, 2}}, {"values", {1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      tensor_from_json(nlohmann::json{{"dims", {2, 1, 1}}, {"values", {1.0, 2.0, 3.0}}}),
      std::invalid_argument);
}

TEST_CASE("matrix and cp json round-trip") {
  Rng rng(149);
  CpDecomposition cp;
  cp.A = rng.gaussian_matrix(3, 2);
  cp.B = rng.gaussian_matrix(4, 2);
  cp.C = rng.gaussian_matrix(2, 2);
  cp.weights = rng.gaussian_vector(2);
  cp.normalized = false;
  const CpDecomposition back = cp_from_json(nlohmann::json::parse(cp_to_json(cp).dump()));
  CHECK(back.A == cp.A);
  CHECK(back.B == cp.B);
  CHECK(back.C == cp.C);
  CHECK(back.weights == cp.weights);
  CHECK_THROWS_AS(cp_from_json(nlohmann::json{{"A", matrix_to_json(cp.A)},
                                              {"B", matrix_to_json(cp.B)},
                                              {"C", matrix_to_json(cp.C)},
                                              {"weights", {1.0}}}),
                  std::invalid_argument);
}

TEST_CASE("fmt_g17 round-trips doubles through decimal") {
  Rng rng(151);
  for (int t = 0; t < 200; ++t) {
    const double v = rng.gaussian() * std::pow(10.0, (rng.uniform() - 0.5) * 40.0);
    CHECK(std::stod(fmt_g17(v)) == v);
  }
}

TEST_CASE("csv writers emit a header and fixed columns") {
  FitTrace trace;
  FitRecord rec;
  rec.iter = 1;
  rec.fit_error = 0.5;
  rec.weights = Vector::Constant(2, 1.5);
  rec.abs_congruence = Matrix::Identity(2, 2);
  trace.records.push_back(rec);
  const std::string csv = trace_csv(trace);
  CHECK(csv.rfind("iter,fit_error,omega_1,omega_2,min_congruence,max_abs_omega\n", 0) == 0);

  DivergenceReport rep;
  rep.n_values = {10.0, 100.0};
  GroupReport g;
  g.group = ComponentGroup({0, 1});
  g.max_weight_series = {1.0, 10.0};
  g.group_sum_norm_series = {2.0, 2.0};
  g.s2s1_a = {0.5, 0.25};
  g.s2s1_b = {0.5, 0.25};
  g.s2s1_c = {0.5, 0.25};
  rep.groups.push_back(g);
  const std::string series = report_series_csv(rep);
  CHECK(series.rfind("n,group,max_abs_omega,group_sum_norm,s2s1_A,s2s1_B,s2s1_C\n", 0) == 0);
  CHECK(std::count(series.begin(), series.end(), '\n') == 3);
}

TEST_CASE("json file write and read") {
  const std::string path = "io_test_tensor.json";
  Tensor3 t(2, 2, 2);
  t(1, 1, 1) = 0.1 + 0.2;  // not exactly representable sum
  write_json_file(path, tensor_to_json(t));
  const Tensor3 back = tensor_from_json(read_json_file(path));
  CHECK(back.values() == t.values());
  std::remove(path.c_str());
  CHECK_THROWS(read_json_file("does_not_exist_anywhere.json"));
}
