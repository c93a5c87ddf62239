// SPDX-License-Identifier: MIT
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpdiverge/als.hpp"
#include "cpdiverge/cp.hpp"
#include "cpdiverge/degeneracy.hpp"
#include "cpdiverge/families.hpp"
#include "cpdiverge/sgsd.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

/// 17 significant digits: lossless decimal round-trip for doubles.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json tensor_to_json(const Tensor3& t) {
  return {{"dims", {t.dim1(), t.dim2(), t.dim3()}}, {"values", t.values()}};
}

inline Tensor3 tensor_from_json(const nlohmann::json& j) {
  const auto dims = j.at("dims").get<std::vector<int>>();
  if (dims.size() != 3) throw std::invalid_argument("tensor json: dims must have 3 entries");
  return Tensor3(dims[0], dims[1], dims[2], j.at("values").get<std::vector<double>>());
}

/// Matrices serialize column-major (row index fastest), matching the tensor
/// linearization.
inline nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> vals(m.data(), m.data() + m.size());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", vals}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto vals = j.at("values").get<std::vector<double>>();
  if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(vals.size()) != rows * cols)
    throw std::invalid_argument("matrix json: bad shape");
  Matrix m(rows, cols);
  std::copy(vals.begin(), vals.end(), m.data());
  return m;
}

inline nlohmann::json cp_to_json(const CpDecomposition& cp) {
  std::vector<double> w(cp.weights.data(), cp.weights.data() + cp.weights.size());
  return {{"A", matrix_to_json(cp.A)},
          {"B", matrix_to_json(cp.B)},
          {"C", matrix_to_json(cp.C)},
          {"weights", w},
          {"normalized", cp.normalized}};
}

inline CpDecomposition cp_from_json(const nlohmann::json& j) {
  CpDecomposition cp;
  cp.A = matrix_from_json(j.at("A"));
  cp.B = matrix_from_json(j.at("B"));
  cp.C = matrix_from_json(j.at("C"));
  const auto w = j.at("weights").get<std::vector<double>>();
  cp.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  cp.normalized = j.value("normalized", false);
  if (cp.A.cols() != cp.B.cols() || cp.A.cols() != cp.C.cols() ||
      cp.weights.size() != cp.A.cols())
    throw std::invalid_argument("cp json: inconsistent component counts");
  return cp;
}

inline nlohmann::json schur_to_json(const SchurForm& f) {
  return {{"S", matrix_to_json(f.S)},
          {"T", matrix_to_json(f.T)},
          {"U", matrix_to_json(f.U)},
          {"G", tensor_to_json(f.G)},
          {"below_diag_residual", f.below_diag_residual},
          {"reconstruction_error", f.reconstruction_error},
          {"sweeps", f.sweeps},
          {"converged", f.converged}};
}

inline nlohmann::json family_to_json(const SequenceFamily& fam) {
  nlohmann::json j{{"kind", family_kind_name(fam.kind())},
                   {"rank", fam.rank()},
                   {"dims", {fam.dim1(), fam.dim2(), fam.dim3()}},
                   {"seed", fam.seed()}};
  if (fam.kind() == FamilyKind::r3_example)
    j["params"] = {{"a", fam.param_a()}, {"e", fam.param_e()}, {"f", fam.param_f()}};
  if (fam.kind() == FamilyKind::r4_example) j["q_retries"] = fam.q_retries();
  return j;
}

inline nlohmann::json report_to_json(const DivergenceReport& rep) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : rep.groups) {
    groups.push_back({{"components", g.group.indices},
                      {"max_weight_series", g.max_weight_series},
                      {"group_sum_norm_series", g.group_sum_norm_series},
                      {"s2s1_A", g.s2s1_a},
                      {"s2s1_B", g.s2s1_b},
                      {"s2s1_C", g.s2s1_c},
                      {"min_abs_congruence", g.min_abs_congruence},
                      {"verdict", verdict_name(g.verdict)},
                      {"bounded_sum_ok", g.bounded_sum_ok},
                      {"congruence_cluster_agrees", g.congruence_cluster_agrees},
                      {"eigen_pattern", g.eigen_pattern},
                      {"eigen_pattern_available", g.eigen_pattern_available}});
  }
  return {{"n_values", rep.n_values},
          {"groups", groups},
          {"congruence_clusters", rep.congruence_clusters},
          {"ungrouped_candidates", rep.ungrouped_candidates},
          {"criteria_disagree", rep.criteria_disagree},
          {"final_norm", rep.final_norm},
          {"thresholds",
           {{"omega_growth", rep.thresholds.omega_growth},
            {"bound_ratio", rep.thresholds.bound_ratio},
            {"congruence_link", rep.thresholds.congruence_link},
            {"tol_prop", rep.thresholds.tol_prop}}}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Sweep series: one row per (n, group), fixed column order.
inline std::string report_series_csv(const DivergenceReport& rep) {
  std::ostringstream os;
  os << "n,group,max_abs_omega,group_sum_norm,s2s1_A,s2s1_B,s2s1_C\n";
  for (std::size_t t = 0; t < rep.n_values.size(); ++t) {
    for (std::size_t g = 0; g < rep.groups.size(); ++g) {
      const auto& gr = rep.groups[g];
      os << fmt_g17(rep.n_values[t]) << ',' << g << ',' << fmt_g17(gr.max_weight_series[t])
         << ',' << fmt_g17(gr.group_sum_norm_series[t]) << ',' << fmt_g17(gr.s2s1_a[t]) << ','
         << fmt_g17(gr.s2s1_b[t]) << ',' << fmt_g17(gr.s2s1_c[t]) << '\n';
    }
  }
  return os.str();
}

/// ALS trace: iter, fit_error, omega_1..R, min_congruence, max_abs_omega.
inline std::string trace_csv(const FitTrace& trace) {
  std::ostringstream os;
  const int r = trace.records.empty() ? 0 : static_cast<int>(trace.records.front().weights.size());
  os << "iter,fit_error";
  for (int i = 1; i <= r; ++i) os << ",omega_" << i;
  os << ",min_congruence,max_abs_omega\n";
  for (const auto& rec : trace.records) {
    os << rec.iter << ',' << fmt_g17(rec.fit_error);
    for (int i = 0; i < r; ++i) os << ',' << fmt_g17(rec.weights[i]);
    os << ',' << fmt_g17(rec.min_congruence()) << ',' << fmt_g17(rec.max_abs_weight()) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json_file(const std::string& path) {
  return nlohmann::json::parse(read_text_file(path));
}

}  // namespace cpd
