// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cpdiverge/cp.hpp"
#include "cpdiverge/errors.hpp"
#include "cpdiverge/sgsd.hpp"
#include "cpdiverge/tensor.hpp"

namespace cpd {

/// sigma_2 / sigma_1 of M: 0 exactly for rank-1 shapes, up to 1 for balanced
/// spectra. Invariant under orthogonal transforms and positive scaling.
inline double rank1_metric(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) throw undefined_metric_error("rank1_metric: zero matrix");
  if (s.size() < 2) return 0.0;
  return s[1] / s[0];
}

struct DetectThresholds {
  double omega_growth = 100.0;    // |w(last)| / |w(first)| ratio marking divergence
  double bound_ratio = 10.0;      // group-sum norm bound, relative to ||final evaluate||
  double congruence_link = 0.9;   // single-linkage threshold on |congruence|
  double tol_prop = 1e-2;         // rank-1 metric threshold for proportionality
};

enum class GroupVerdict { proportional, non_proportional, undetermined };

inline const char* verdict_name(GroupVerdict v) {
  switch (v) {
    case GroupVerdict::proportional: return "proportional";
    case GroupVerdict::non_proportional: return "non-proportional";
    case GroupVerdict::undetermined: return "undetermined";
  }
  return "?";
}

struct GroupReport {
  ComponentGroup group;
  std::vector<double> max_weight_series;      // max |w_r|, r in group, per snapshot
  std::vector<double> group_sum_norm_series;  // ||group_sum|| per snapshot
  std::vector<double> s2s1_a, s2s1_b, s2s1_c; // rank-1 metrics of group columns
  double min_abs_congruence = 1.0;            // within group, last snapshot
  GroupVerdict verdict = GroupVerdict::undetermined;
  bool bounded_sum_ok = false;                // bounded-sum criterion satisfied
  bool congruence_cluster_agrees = false;     // matches a congruence cluster exactly
  std::vector<int> eigen_pattern;             // multiplicity partition, empty if unavailable
  bool eigen_pattern_available = false;
};

struct DivergenceReport {
  std::vector<double> n_values;                       // snapshot labels
  std::vector<GroupReport> groups;                    // pairwise disjoint, size >= 2
  std::vector<std::vector<int>> congruence_clusters;  // linkage clusters of candidates
  std::vector<int> ungrouped_candidates;              // diverging but in no bounded subset
  bool criteria_disagree = false;
  double final_norm = 0;                              // ||evaluate(last snapshot)||
  DetectThresholds thresholds;
};

namespace detail {

inline std::vector<std::vector<int>> single_linkage(const std::vector<int>& items,
                                                    const Matrix& absc, double link) {
  std::vector<std::vector<int>> clusters;
  std::vector<bool> used(items.size(), false);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> stack{i};
    used[i] = true;
    std::vector<int> cluster;
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      cluster.push_back(items[t]);
      for (std::size_t u = 0; u < items.size(); ++u)
        if (!used[u] && absc(items[t], items[u]) >= link) {
          used[u] = true;
          stack.push_back(u);
        }
    }
    std::sort(cluster.begin(), cluster.end());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace detail

/// Verdict and metric series for one group of components along a snapshot
/// sequence. Proportional requires the rank-1 metric of the group-restricted
/// columns of A, B and C to be below tol_prop at the last snapshot and
/// non-increasing; a metric that is both above the threshold and plateauing
/// marks the group non-proportional. When the boundary tensor is supplied and
/// the group covers every component, the eigen pattern is read off the
/// normalized Schur core of the boundary tensor.
inline GroupReport classify_group(const std::vector<CpDecomposition>& series,
                                  const ComponentGroup& d,
                                  const std::optional<Tensor3>& boundary = std::nullopt,
                                  DetectThresholds th = {}) {
  if (series.size() < 2) throw std::invalid_argument("classify_group: need at least 2 snapshots");
  const int r = series.front().rank();
  for (const auto& cp : series)
    if (cp.rank() != r || !cp.normalized)
      throw std::invalid_argument("classify_group: snapshots must be normalized with a common rank");
  for (int idx : d.indices)
    if (idx < 0 || idx >= r) throw std::invalid_argument("classify_group: index out of range");

  GroupReport rep;
  rep.group = d;
  const int gs = static_cast<int>(d.size());
  for (const auto& cp : series) {
    Matrix ga(cp.A.rows(), gs), gb(cp.B.rows(), gs), gc(cp.C.rows(), gs);
    double wmax = 0.0;
    for (int t = 0; t < gs; ++t) {
      const int idx = d.indices[static_cast<std::size_t>(t)];
      ga.col(t) = cp.A.col(idx);
      gb.col(t) = cp.B.col(idx);
      gc.col(t) = cp.C.col(idx);
      wmax = std::max(wmax, std::abs(cp.weights[idx]));
    }
    rep.max_weight_series.push_back(wmax);
    rep.group_sum_norm_series.push_back(frobenius_norm(group_sum(cp, d)));
    rep.s2s1_a.push_back(gs > 1 ? rank1_metric(ga) : 0.0);
    rep.s2s1_b.push_back(gs > 1 ? rank1_metric(gb) : 0.0);
    rep.s2s1_c.push_back(gs > 1 ? rank1_metric(gc) : 0.0);
  }

  const Matrix absc = abs_congruence_matrix(series.back());
  rep.min_abs_congruence = 1.0;
  for (int i = 0; i < gs; ++i)
    for (int j = i + 1; j < gs; ++j)
      rep.min_abs_congruence =
          std::min(rep.min_abs_congruence, absc(d.indices[i], d.indices[j]));

  auto last = [](const std::vector<double>& v) { return v.back(); };
  auto first = [](const std::vector<double>& v) { return v.front(); };
  auto prev = [](const std::vector<double>& v) { return v[v.size() - 2]; };
  const std::vector<const std::vector<double>*> modes{&rep.s2s1_a, &rep.s2s1_b, &rep.s2s1_c};
  bool all_prop = gs > 1;
  bool any_plateau_above = false;
  for (const auto* m : modes) {
    const bool prop = last(*m) < th.tol_prop && last(*m) <= first(*m);
    if (!prop) all_prop = false;
    if (last(*m) >= th.tol_prop && last(*m) >= 0.5 * prev(*m)) any_plateau_above = true;
  }
  rep.verdict = all_prop ? GroupVerdict::proportional
                         : (any_plateau_above ? GroupVerdict::non_proportional
                                              : GroupVerdict::undetermined);

  if (boundary && gs == r) {
    const int rb = std::min({r, boundary->dim1(), boundary->dim2()});
    try {
      SgsdOptions so;
      so.max_sweeps = 1500;
      so.tol = 0.0;
      const SchurForm form = sgsd_jacobi(*boundary, rb, so);
      if (auto mix = find_nonsingular_slicemix(form.G)) {
        const NormalizedCore nc = normalize_first_slice(form.G, *mix);
        const EigenStructure es = eigen_structure(nc);
        if (!es.multiplicity_partition.empty()) {
          rep.eigen_pattern = es.multiplicity_partition.front();
          rep.eigen_pattern_available = true;
        }
      }
    } catch (const std::exception&) {
      // pattern stays unavailable; the verdict above is unaffected
    }
  }
  return rep;
}

/// Detect diverging component groups along a sequence of normalized
/// snapshots. Components whose |w| grows by more than omega_growth between
/// the first and last snapshot are divergence candidates. Candidates are
/// grouped primarily by the bounded-sum criterion: minimal subsets (size
/// >= 2, smallest first) whose group-sum norm stays within bound_ratio times
/// the final tensor norm at every snapshot. Single-linkage clusters on
/// |congruence| >= congruence_link are recorded alongside, and disagreement
/// between the two criteria is flagged rather than resolved.
inline DivergenceReport detect_groups(const std::vector<CpDecomposition>& series,
                                      const std::vector<double>& n_values,
                                      DetectThresholds th = {},
                                      const std::optional<Tensor3>& boundary = std::nullopt) {
  if (series.size() < 3) throw std::invalid_argument("detect_groups: need at least 3 snapshots");
  if (n_values.size() != series.size())
    throw std::invalid_argument("detect_groups: n grid size mismatch");
  const int r = series.front().rank();
  for (const auto& cp : series)
    if (cp.rank() != r) throw std::invalid_argument("detect_groups: inconsistent rank across snapshots");
  for (const auto& cp : series)
    if (!cp.normalized) throw std::invalid_argument("detect_groups: snapshots must be normalized");

  DivergenceReport rep;
  rep.n_values = n_values;
  rep.thresholds = th;
  rep.final_norm = frobenius_norm(evaluate(series.back()));

  std::vector<int> candidates;
  for (int c = 0; c < r; ++c) {
    const double w0 = std::abs(series.front().weights[c]);
    const double w1 = std::abs(series.back().weights[c]);
    if (w0 > 0.0 && w1 / w0 > th.omega_growth) candidates.push_back(c);
  }

  const Matrix absc = abs_congruence_matrix(series.back());
  rep.congruence_clusters = detail::single_linkage(candidates, absc, th.congruence_link);

  auto bounded = [&](const std::vector<int>& subset) {
    const ComponentGroup g(subset);
    for (const auto& cp : series)
      if (frobenius_norm(group_sum(cp, g)) > th.bound_ratio * rep.final_norm) return false;
    return true;
  };

  // Greedy minimal bounded subsets, smallest size first, lexicographic ties.
  std::vector<int> remaining = candidates;
  std::vector<std::vector<int>> groups;
  bool found = true;
  while (found && remaining.size() >= 2) {
    found = false;
    const int m = static_cast<int>(remaining.size());
    for (int size = 2; size <= m && !found; ++size) {
      std::vector<int> pick(size);
      // enumerate size-subsets of `remaining` in lexicographic order
      std::vector<int> idx(size);
      for (int i = 0; i < size; ++i) idx[i] = i;
      while (true) {
        for (int i = 0; i < size; ++i) pick[i] = remaining[idx[i]];
        if (bounded(pick)) {
          groups.push_back(pick);
          std::vector<int> rest;
          for (int v : remaining)
            if (std::find(pick.begin(), pick.end(), v) == pick.end()) rest.push_back(v);
          remaining = std::move(rest);
          found = true;
          break;
        }
        int i = size - 1;
        while (i >= 0 && idx[i] == m - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  rep.ungrouped_candidates = remaining;

  for (const auto& g : groups) {
    GroupReport gr = classify_group(series, ComponentGroup(g), boundary, th);
    gr.bounded_sum_ok = true;
    gr.congruence_cluster_agrees =
        std::find(rep.congruence_clusters.begin(), rep.congruence_clusters.end(), g) !=
        rep.congruence_clusters.end();
    if (!gr.congruence_cluster_agrees) rep.criteria_disagree = true;
    rep.groups.push_back(std::move(gr));
  }
  for (const auto& cluster : rep.congruence_clusters) {
    if (cluster.size() < 2) continue;
    bool matched = false;
    for (const auto& gr : rep.groups)
      if (gr.group.indices == cluster) matched = true;
    if (!matched) rep.criteria_disagree = true;
  }
  return rep;
}

}  // namespace cpd
