// SPDX-License-Identifier: MIT
//
// cpdiverge CLI: sweeps over diverging CP families, SGSD analysis of tensor
// files, ALS fitting, and family tensor export. Exit codes: 0 success,
// 1 analysis-level failure, 2 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpdiverge/cpdiverge.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("CPDIVERGE_OUT");
  return env && *env ? env : ".";
}

cpd::SequenceFamily make_family(const std::string& kind, double a, double e, double f,
                                std::uint64_t seed, const std::vector<int>& dims) {
  auto dim = [&dims](std::size_t i, int fallback) {
    return dims.size() == 3 ? dims[i] : fallback;
  };
  if (kind == "r3") return cpd::family_r3(a, e, f);
  if (kind == "r4") return cpd::family_r4(seed, dim(0, 6), dim(1, 6), dim(2, 5));
  if (kind == "r6") return cpd::family_r6(seed, dim(0, 8), dim(1, 8), dim(2, 8));
  if (kind == "generic-r3") return cpd::family_generic(seed, cpd::FamilyKind::generic_r3);
  if (kind == "generic-332") return cpd::family_generic(seed, cpd::FamilyKind::generic_332);
  throw CLI::ValidationError("--family", "unknown family kind: " + kind);
}

std::string eigen_report_text(const cpd::Tensor3& g, const cpd::SchurForm& form,
                              const std::optional<cpd::Matrix>& mix) {
  std::ostringstream os;
  const double ng = cpd::frobenius_norm(g);
  const double zero_tol = 1e-6 * ng;
  os << "core dims: " << g.dim1() << " x " << g.dim2() << " x " << g.dim3() << "\n";
  os << "below-diagonal residual: " << cpd::fmt_g17(form.below_diag_residual) << "\n";
  os << "reconstruction error: " << cpd::fmt_g17(form.reconstruction_error) << "\n";

  os << "common zero diagonal positions (|entry| < 1e-6*||G|| in every slice):";
  for (int i = 0; i < g.dim1(); ++i) {
    bool zero = true;
    for (int k = 0; k < g.dim3(); ++k)
      if (std::abs(g(i, i, k)) >= zero_tol) zero = false;
    if (zero) os << " (" << i + 1 << "," << i + 1 << ")";
  }
  os << "\n";

  if (!mix) {
    os << "nonsingular slicemix: none\n";
    return os.str();
  }
  os << "nonsingular slicemix: found\n";
  const cpd::NormalizedCore nc = cpd::normalize_first_slice(g, *mix);
  const cpd::EigenStructure es = cpd::eigen_structure(nc);
  const double ncore = cpd::frobenius_norm(nc.core);
  for (int k = 1; k < nc.core.dim3(); ++k) {
    os << "slice " << k + 1 << " diagonal:";
    for (int i = 0; i < nc.core.dim1(); ++i) os << ' ' << cpd::fmt_g17(nc.core(i, i, k));
    os << "\n  multiplicity partition: {";
    const auto& part = es.multiplicity_partition[static_cast<std::size_t>(k - 1)];
    for (std::size_t t = 0; t < part.size(); ++t) os << (t ? "," : "") << part[t];
    os << "}\n";
  }
  os << "common zero strict-upper positions (normalized core, slices 2..K'):";
  for (int i = 0; i < nc.core.dim1(); ++i)
    for (int j = i + 1; j < nc.core.dim2(); ++j) {
      bool zero = true;
      for (int k = 1; k < nc.core.dim3(); ++k)
        if (std::abs(nc.core(i, j, k)) >= 1e-6 * ncore) zero = false;
      if (zero) os << " (" << i + 1 << "," << j + 1 << ")";
    }
  os << "\n";
  os << "defective: " << (es.defective ? "yes" : "no") << "\n";
  os << "independent eigenvectors: " << es.independent_eigenvectors << "\n";
  os << "max validation residual: " << cpd::fmt_g17(es.max_validation_residual) << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CP decomposition degeneracy analysis"};
  app.require_subcommand(1);

  std::string family = "r3", out_dir = default_out_dir(), input, init = "random";
  double a = 0.0, e = 1.0, f = 1.0;
  std::uint64_t seed = 1;
  std::vector<int> dims;
  std::vector<long> ngrid = cpd::default_n_grid();
  cpd::DetectThresholds th;
  int rank = 3;
  cpd::SgsdOptions sgsd_opts;
  sgsd_opts.max_sweeps = 1500;
  sgsd_opts.tol = 0.0;
  cpd::SlicemixOptions mix_opts;
  cpd::AlsOptions als_opts;
  long record_stride = 1;

  auto add_family_flags = [&](CLI::App* cmd) {
    cmd->add_option("--family", family, "family kind: r3, r4, r6, generic-r3, generic-332");
    cmd->add_option("--a", a, "r3 family: diagonal value a");
    cmd->add_option("--e", e, "r3 family: entry e (nonzero)");
    cmd->add_option("--f", f, "r3 family: entry f (nonzero)");
    cmd->add_option("--seed", seed, "random seed for seeded families");
    cmd->add_option("--dims", dims, "dimensions I J K")->expected(3);
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "run a family over the n grid and detect groups");
  add_family_flags(sweep);
  sweep->add_option("--ngrid", ngrid, "snapshot points n");
  sweep->add_option("--omega-growth", th.omega_growth, "divergence ratio threshold");
  sweep->add_option("--bound-ratio", th.bound_ratio, "group-sum bound, relative to final norm");
  sweep->add_option("--congruence-link", th.congruence_link, "congruence linkage threshold");
  sweep->add_option("--tol-prop", th.tol_prop, "proportionality metric threshold");

  CLI::App* analyze = app.add_subcommand("analyze", "SGSD + eigenstructure of a tensor file");
  analyze->add_option("--input", input, "tensor JSON file")->required();
  analyze->add_option("--rank", rank, "core size R")->required();
  analyze->add_option("--max-sweeps", sgsd_opts.max_sweeps, "Jacobi sweep budget");
  analyze->add_option("--tol", sgsd_opts.tol, "relative objective-change stop");
  analyze->add_option("--cond-cap", mix_opts.cond_cap, "slicemix condition cap");
  analyze->add_option("--attempts", mix_opts.attempts, "random slicemix attempts");
  analyze->add_option("--seed", mix_opts.seed, "slicemix search seed");
  analyze->add_option("--out", out_dir, "output directory");

  CLI::App* fit = app.add_subcommand("fit", "ALS fit of a tensor file");
  fit->add_option("--input", input, "tensor JSON file")->required();
  fit->add_option("--rank", rank, "CP rank R")->required();
  fit->add_option("--max-iters", als_opts.max_iters, "sweep budget");
  fit->add_option("--rel-tol", als_opts.rel_tol, "relative fit-change stop");
  fit->add_option("--seed", als_opts.seed, "init seed");
  fit->add_option("--init", init, "init kind: random or hosvd");
  fit->add_option("--record-stride", record_stride, "record every k-th sweep");
  fit->add_option("--out", out_dir, "output directory");

  CLI::App* example = app.add_subcommand("example", "write a family's boundary tensor to file");
  add_family_flags(example);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  namespace fs = std::filesystem;
  try {
    fs::create_directories(out_dir);

    if (sweep->parsed()) {
      if (ngrid.empty()) {
        std::cerr << "sweep: --ngrid must not be empty\n";
        return 2;
      }
      const cpd::SequenceFamily fam = make_family(family, a, e, f, seed, dims);
      std::vector<cpd::CpDecomposition> series;
      std::vector<double> nvals;
      for (long n : ngrid) {
        series.push_back(cpd::normalize(fam.snapshot(n)));
        nvals.push_back(static_cast<double>(n));
      }
      const cpd::DivergenceReport rep = cpd::detect_groups(series, nvals, th, fam.limit());
      const std::string stem = out_dir + "/sweep_" + family;
      cpd::write_text_file(stem + ".csv", cpd::report_series_csv(rep));
      cpd::write_json_file(stem + "_report.json", cpd::report_to_json(rep));
      cpd::write_json_file(stem + "_family.json", cpd::family_to_json(fam));
      std::cout << "groups: " << rep.groups.size() << "\n";
      for (const auto& g : rep.groups) {
        std::cout << "  {";
        for (std::size_t t = 0; t < g.group.indices.size(); ++t)
          std::cout << (t ? "," : "") << g.group.indices[t] + 1;
        std::cout << "} verdict=" << cpd::verdict_name(g.verdict);
        if (g.eigen_pattern_available) {
          std::cout << " pattern={";
          for (std::size_t t = 0; t < g.eigen_pattern.size(); ++t)
            std::cout << (t ? "," : "") << g.eigen_pattern[t];
          std::cout << "}";
        }
        std::cout << "\n";
      }
      std::cout << "wrote " << stem << ".csv\n";
      return 0;
    }

    if (analyze->parsed()) {
      if (!fs::exists(input)) {
        std::cerr << "analyze: no such file: " << input << "\n";
        return 2;
      }
      const cpd::Tensor3 x = cpd::tensor_from_json(cpd::read_json_file(input));
      const cpd::SchurForm form = cpd::sgsd_jacobi(x, rank, sgsd_opts);
      const auto mix = cpd::find_nonsingular_slicemix(form.G, mix_opts);
      cpd::write_json_file(out_dir + "/schur.json", cpd::schur_to_json(form));
      const std::string report = eigen_report_text(form.G, form, mix);
      cpd::write_text_file(out_dir + "/eigen_report.txt", report);
      std::cout << report;
      if (!form.converged && form.below_diag_residual > 1e-6 * cpd::frobenius_norm(x)) {
        std::cerr << "analyze: triangularization did not converge\n";
        return 1;
      }
      return 0;
    }

    if (fit->parsed()) {
      if (!fs::exists(input)) {
        std::cerr << "fit: no such file: " << input << "\n";
        return 2;
      }
      if (init == "hosvd")
        als_opts.init = cpd::AlsOptions::Init::hosvd;
      else if (init != "random") {
        std::cerr << "fit: --init must be random or hosvd\n";
        return 2;
      }
      als_opts.record_stride = record_stride;
      const cpd::Tensor3 z = cpd::tensor_from_json(cpd::read_json_file(input));
      const cpd::FitTrace trace = cpd::fit_als(z, rank, als_opts);
      cpd::write_text_file(out_dir + "/trace.csv", cpd::trace_csv(trace));
      const cpd::SwampMetrics sm = cpd::swamp_metrics(trace);
      nlohmann::json j{{"final", cpd::cp_to_json(trace.final_cp)},
                       {"iterations", trace.iterations},
                       {"converged", trace.termination == cpd::FitTrace::Termination::converged},
                       {"ridge_used", trace.ridge_used},
                       {"final_fit_error", trace.records.back().fit_error},
                       {"weight_growth_rate", sm.weight_growth_rate},
                       {"fit_decay_rate", sm.fit_decay_rate},
                       {"min_group_congruence", sm.min_group_congruence}};
      cpd::write_json_file(out_dir + "/fit.json", j);
      std::cout << "iterations: " << trace.iterations
                << " final fit error: " << cpd::fmt_g17(trace.records.back().fit_error) << "\n";
      return 0;
    }

    if (example->parsed()) {
      const cpd::SequenceFamily fam = make_family(family, a, e, f, seed, dims);
      const std::string stem = out_dir + "/" + family;
      cpd::write_json_file(stem + "_tensor.json", cpd::tensor_to_json(fam.limit()));
      cpd::write_json_file(stem + "_family.json", cpd::family_to_json(fam));
      std::cout << "wrote " << stem << "_tensor.json\n";
      return 0;
    }
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "error: malformed input: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
