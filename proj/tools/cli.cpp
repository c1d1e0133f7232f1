/*
 * Copyright (c) 2026, The sliceig Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sliceig/driver.hpp"
#include "sliceig/matrix_market.hpp"

namespace sliceig::cli {

namespace {

constexpr double kCliPhi = 0.8;

struct Options {
  std::string matrix;
  std::vector<std::size_t> laplacian;
  std::vector<double> interval;
  std::vector<double> bounds;
  std::string slices = "auto";
  double phi = kCliPhi;
  std::string damping = "sigma";
  double tol = 1e-8;
  double m_factor = 4.0;
  double its_factor = 16.0;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::string engine = "lanczos";
  std::string out;
  std::string config;
  bool vectors = false;
  int dos_degree = kDefaultDosDegree;
  int dos_vectors = kDefaultDosVectors;
  int points = 2001;
};

void add_source(CLI::App* cmd, Options& o) {
  auto* m = cmd->add_option("--matrix", o.matrix, "Matrix Market file (real symmetric)");
  auto* l = cmd->add_option("--laplacian", o.laplacian, "7-point 3D Laplacian of size NX NY NZ")
                ->expected(3)
                ->check(CLI::PositiveNumber);
  m->excludes(l);
}

void add_interval(CLI::App* cmd, Options& o) {
  cmd->add_option("--interval", o.interval, "Target interval LO HI")->expected(2)->required();
}

void add_filter_opts(CLI::App* cmd, Options& o) {
  cmd->add_option("--phi", o.phi, "Threshold on filter values at the interval ends")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--damping", o.damping, "none | jackson | sigma")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "jackson", "sigma", "lanczos_sigma"}));
  cmd->add_option("--bounds", o.bounds, "Spectrum bounds LO HI (estimated when omitted)")->expected(2);
}

void add_solve_opts(CLI::App* cmd, Options& o) {
  add_source(cmd, o);
  add_interval(cmd, o);
  add_filter_opts(cmd, o);
  cmd->add_option("--slices", o.slices, "Number of slices or 'auto'")->capture_default_str();
  cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--m-factor", o.m_factor, "Basis size per estimated eigenvalue")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--its-factor", o.its_factor, "Step budget per estimated eigenvalue")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Concurrent slice solvers")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--engine", o.engine, "lanczos | subspace")
      ->capture_default_str()
      ->check(CLI::IsMember({"lanczos", "subspace"}));
  cmd->add_option("--dos-degree", o.dos_degree, "KPM degree")->capture_default_str();
  cmd->add_option("--dos-vectors", o.dos_vectors, "KPM probe vectors")->capture_default_str();
  cmd->add_option("--out", o.out, "Output prefix: PREFIX.csv, PREFIX.json (and PREFIX.vec)");
  cmd->add_flag("--vectors", o.vectors, "Also write eigenvectors to PREFIX.vec");
}

void use_config(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Flat key = value file; command-line flags take precedence");
}

// CLI11 only reads config files attached to the root app, so the file is
// spliced into the argument list as flags the command line did not set.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty() || args.size() < 2) return args;

  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));
  }
  std::vector<std::string> extra;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name.empty() || item.name == "++" || item.name == "--" || given.count(item.name)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") extra.push_back("--" + item.name);
      continue;
    }
    extra.push_back("--" + item.name);
    for (const auto& v : item.inputs) {
      std::istringstream words(v);
      for (std::string w; words >> w;) extra.push_back(w);
    }
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

SparseSymMatrix load_source(const Options& o) {
  if (!o.laplacian.empty()) return gen_laplacian3d(o.laplacian[0], o.laplacian[1], o.laplacian[2]);
  if (!o.matrix.empty()) return load_matrix_market(o.matrix);
  throw UsageError("a matrix source is required (--matrix or --laplacian)");
}

std::optional<SpectralMap> given_bounds(const Options& o) {
  if (o.bounds.empty()) return std::nullopt;
  if (!(o.bounds[0] < o.bounds[1])) throw UsageError("--bounds needs LO < HI");
  return SpectralMap::from_bounds(o.bounds[0], o.bounds[1]);
}

RunConfig make_run_config(const Options& o) {
  RunConfig c;
  if (!(o.interval[0] < o.interval[1])) throw UsageError("--interval needs LO < HI");
  c.xi = o.interval[0];
  c.eta = o.interval[1];
  if (o.slices != "auto") {
    std::size_t pos = 0;
    long long v = -1;
    try {
      v = std::stoll(o.slices, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != o.slices.size() || v < 1) throw UsageError("--slices must be a positive integer or 'auto'");
    c.nslices = static_cast<std::size_t>(v);
  }
  c.phi = o.phi;
  c.damping = parse_damping(o.damping);
  c.tol = o.tol;
  c.m_factor = o.m_factor;
  c.its_factor = o.its_factor;
  c.threads = o.threads;
  c.seed = o.seed;
  c.engine = parse_engine(o.engine);
  c.dos_degree = o.dos_degree;
  c.dos_vectors = o.dos_vectors;
  c.bounds = given_bounds(o);
  return c;
}

void print_table(std::ostream& out, const RunReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%5s %-25s %5s %6s %9s %9s %9s %10s %10s %6s\n", "slice", "interval", "deg", "iter",
                "matvecs", "mv_sec", "total_sec", "res_max", "res_avg", "count");
  out << buf;
  for (const auto& r : rep.slices) {
    std::snprintf(buf, sizeof buf, "%5d [%10.6f, %10.6f] %5d %6zu %9zu %9.2f %9.2f %10.2e %10.2e %6zu%s\n",
                  r.slice_id, r.lo, r.hi, r.degree, r.iterations, r.matvecs, r.matvec_seconds, r.total_seconds,
                  r.residual_max, r.residual_avg, r.count, r.error.empty() ? "" : "  FAILED");
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "total eigenpairs %zu, matvecs %zu (bounds %zu, dos %zu), wall %.2f s\n",
                rep.pairs.size(), rep.total_matvecs(), rep.bound_matvecs, rep.dos_matvecs, rep.wall_seconds);
  out << buf;
}

void write_outputs(const Options& o, const RunReport& rep, std::size_t n) {
  if (o.out.empty()) return;
  std::ofstream csv(o.out + ".csv");
  if (!csv) throw Error("cannot write '" + o.out + ".csv'");
  write_eigen_csv(csv, rep.pairs);
  std::ofstream js(o.out + ".json");
  if (!js) throw Error("cannot write '" + o.out + ".json'");
  js << report_json(rep) << '\n';
  if (o.vectors) write_vectors_binary(o.out + ".vec", rep.pairs, n);
}

int report_failures(const RunReport& rep, std::ostream& err) {
  if (rep.complete()) return kOk;
  for (const auto& r : rep.slices)
    if (!r.error.empty()) err << "slice " << r.slice_id << ": " << r.error << '\n';
  return kNumerical;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto a = load_source(o);
  const auto rep = run_solve(a, make_run_config(o));
  print_table(out, rep);
  write_outputs(o, rep, a.n());
  return report_failures(rep, err);
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.laplacian.empty()) throw UsageError("check needs a generated matrix with a known spectrum (--laplacian)");
  const auto a = load_source(o);
  const auto cfg = make_run_config(o);
  const auto rep = run_solve(a, cfg);
  print_table(out, rep);
  write_outputs(o, rep, a.n());
  const auto& L = o.laplacian;

  auto oracle = laplacian_eigs_in(L[0], L[1], L[2], cfg.xi, cfg.eta);
  auto diff = compare_with_oracle(rep.pairs, oracle, 1e-8, cfg.tol);
  bool ok = diff.ok();
  char buf[160];
  for (const auto& r : rep.slices) {
    const auto expect = laplacian_eigs_in(L[0], L[1], L[2], r.lo, r.hi).size();
    if (expect != r.count) {
      ok = false;
      std::snprintf(buf, sizeof buf, "slice %d [%.10g, %.10g]: found %zu, expected %zu\n", r.slice_id, r.lo, r.hi,
                    r.count, expect);
      err << buf;
    }
  }
  auto slice_of = [&](double x) {
    const auto& b = rep.plan.bounds;
    auto it = std::upper_bound(b.begin() + 1, b.end() - 1, x);
    return static_cast<int>(it - b.begin()) - 1;
  };
  for (double x : diff.missed) {
    std::snprintf(buf, sizeof buf, "missed %.17g (slice %d)\n", x, slice_of(x));
    err << buf;
  }
  for (const auto& [s, x] : diff.spurious) {
    std::snprintf(buf, sizeof buf, "spurious %.17g (slice %d)\n", x, s);
    err << buf;
  }
  for (const auto& [s, x] : diff.bad_residual) {
    std::snprintf(buf, sizeof buf, "residual above tol at %.17g (slice %d)\n", x, s);
    err << buf;
  }
  const int fail = report_failures(rep, err);
  if (!ok) {
    out << "check: MISMATCH against " << oracle.size() << " exact eigenvalues\n";
    return kMismatch;
  }
  out << "check: OK, " << oracle.size() << " eigenvalues match\n";
  return fail;
}

int cmd_filter_design(const Options& o, std::ostream& out, std::ostream& err) {
  auto map = given_bounds(o);
  if (!map) map = estimate_bounds(load_source(o), o.seed);
  if (!(o.interval[0] < o.interval[1])) throw UsageError("--interval needs LO < HI");
  FilterSpec spec;
  spec.xi = o.interval[0];
  spec.eta = o.interval[1];
  spec.damping = parse_damping(o.damping);
  spec.phi_threshold = o.phi;
  const auto filter = select_degree(spec, *map);
  if (!o.out.empty()) {
    std::ofstream tsv(o.out);
    if (!tsv) throw Error("cannot write '" + o.out + "'");
    write_filter_curve(tsv, filter, *map, o.points);
  } else {
    write_filter_curve(out, filter, *map, o.points);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "k=%d gamma=%.12g bar=%.12g balanced=%s bounds=[%.10g, %.10g]\n", filter.degree(),
                filter.gamma(), filter.bar(), filter.balanced() ? "yes" : "no", map->lo, map->hi);
  (o.out.empty() ? err : out) << buf;
  return kOk;
}

int cmd_slice_plan(const Options& o, std::ostream& out) {
  const auto a = load_source(o);
  const auto cfg = make_run_config(o);
  const auto map = cfg.bounds ? *cfg.bounds : estimate_bounds(a, cfg.seed);
  const auto dos = kpm_dos(a, map, cfg.dos_degree, cfg.dos_vectors, cfg.seed);
  const auto ns = cfg.nslices ? *cfg.nslices : auto_slice_count(dos, cfg.xi, cfg.eta);
  const auto plan = plan_slices(dos, cfg.xi, cfg.eta, ns);
  char buf[160];
  std::snprintf(buf, sizeof buf, "bounds [%.10g, %.10g], estimated total %zu in %zu slice(s)\n", map.lo, map.hi,
                plan.total_estimate, plan.size());
  out << buf;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.10f\t%.10f\t%zu\n", i, plan.lo(i), plan.hi(i), plan.counts[i]);
    out << buf;
  }
  return kOk;
}

int cmd_gen_laplacian(const Options& o, std::ostream& out) {
  if (o.laplacian.size() != 3) throw UsageError("gen-laplacian needs NX NY NZ");
  const auto a = gen_laplacian3d(o.laplacian[0], o.laplacian[1], o.laplacian[2]);
  if (o.out.empty())
    write_matrix_market(out, a);
  else
    save_matrix_market(o.out, a);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interior symmetric eigenvalues by polynomial filtering and spectrum slicing", "sliceig"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sliceig 0.1.0");
  Options o;

  auto* solve = app.add_subcommand("solve", "Compute all eigenpairs in an interval");
  add_solve_opts(solve, o);
  use_config(solve, o);

  auto* check = app.add_subcommand("check", "Solve and compare against the exact Laplacian spectrum");
  add_solve_opts(check, o);
  use_config(check, o);

  auto* design = app.add_subcommand("filter-design", "Select and tabulate the filter for an interval");
  add_source(design, o);
  add_interval(design, o);
  add_filter_opts(design, o);
  design->add_option("--points", o.points, "Curve points")->capture_default_str()->check(CLI::Range(2, 1000000));
  design->add_option("--seed", o.seed, "Seed for bound estimation")->capture_default_str();
  design->add_option("--out", o.out, "TSV output file (stdout when omitted)");
  use_config(design, o);

  auto* plan = app.add_subcommand("slice-plan", "Estimate the density of states and split an interval");
  add_source(plan, o);
  add_interval(plan, o);
  plan->add_option("--slices", o.slices, "Number of slices or 'auto'")->capture_default_str();
  plan->add_option("--bounds", o.bounds, "Spectrum bounds LO HI")->expected(2);
  plan->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  plan->add_option("--dos-degree", o.dos_degree, "KPM degree")->capture_default_str();
  plan->add_option("--dos-vectors", o.dos_vectors, "KPM probe vectors")->capture_default_str();
  use_config(plan, o);

  auto* gen = app.add_subcommand("gen-laplacian", "Write a 3D Laplacian in Matrix Market format");
  gen->add_option("size", o.laplacian, "NX NY NZ")->expected(3)->required()->check(CLI::PositiveNumber);
  gen->add_option("--out", o.out, "Output file (stdout when omitted)");

  try {
    const auto full = expand_config(args);
    std::vector<std::string> rev(full.rbegin(), full.rend() - (full.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.back()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(o, out, err);
    if (check->parsed()) return cmd_check(o, out, err);
    if (design->parsed()) return cmd_filter_design(o, out, err);
    if (plan->parsed()) return cmd_slice_plan(o, out);
    if (gen->parsed()) return cmd_gen_laplacian(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DegreeCapError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace sliceig::cli
