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

#include "sliceig/driver.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "sliceig/orthogonalize.hpp"

namespace sliceig {

namespace {

constexpr char kVectorMagic[8] = {'S', 'L', 'I', 'C', 'E', 'I', 'G', 'V'};
constexpr std::uint64_t kBoundStream = 0xB0B0;
constexpr std::uint64_t kDosStream = 0xD05;

struct SliceOutcome {
  SliceRecord record;
  std::vector<EigResult> pairs;
};

std::size_t scaled(double factor, std::size_t nev) {
  return static_cast<std::size_t>(std::ceil(factor * static_cast<double>(nev)));
}

void fill_record(SliceRecord& r, const IntervalSolution& sol) {
  const auto& st = sol.stats;
  r.iterations = st.iterations;
  r.matvecs = st.filter_matvecs;
  r.rq_matvecs = st.rq_matvecs;
  r.restarts = st.restarts;
  r.matvec_seconds = st.matvec_seconds;
  r.total_seconds = st.total_seconds;
  r.residual_max = st.residual_max;
  r.residual_avg = st.residual_avg;
  r.count = sol.pairs.size();
}

SliceOutcome solve_slice(const SparseSymMatrix& a, const RunConfig& cfg, const SpectralMap& map, int id, double lo,
                         double hi, std::size_t nev) {
  SliceOutcome out;
  auto& r = out.record;
  r.slice_id = id;
  r.lo = lo;
  r.hi = hi;
  r.nev_estimate = nev;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    FilterSpec spec;
    spec.xi = lo;
    spec.eta = hi;
    spec.damping = cfg.damping;
    spec.phi_threshold = cfg.phi;
    const PolyFilter filter = select_degree(spec, map);
    r.degree = filter.degree();
    r.gamma = filter.gamma();
    r.bar = filter.bar();
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(id) + 1);

    IntervalSolution sol;
    try {
      if (cfg.engine == Engine::lanczos) {
        SolverConfig sc;
        sc.nev = nev;
        const std::size_t m = std::max(scaled(cfg.m_factor, nev), nev + 40);
        sc.m = m;
        sc.max_its = std::max(scaled(cfg.its_factor, nev), 4 * m);
        sc.tol = cfg.tol;
        sc.seed = seed;
        sol = solve_interval(a, map, filter, lo, hi, sc);
      } else {
        SubspaceConfig sc;
        sc.nev = nev;
        sc.tol = cfg.tol;
        sc.seed = seed;
        sol = solve_subspace(a, map, filter, lo, hi, sc);
      }
    } catch (const PartialResultError& e) {
      sol = e.partial();
      r.unconverged = e.unconverged();
      r.error = e.what();
    }
    fill_record(r, sol);
    for (auto& p : sol.pairs) p.slice_id = id;
    out.pairs = std::move(sol.pairs);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

std::string to_string(Engine e) { return e == Engine::lanczos ? "lanczos" : "subspace"; }

Engine parse_engine(const std::string& s) {
  if (s == "lanczos") return Engine::lanczos;
  if (s == "subspace") return Engine::subspace;
  throw UsageError("unknown engine '" + s + "' (expected lanczos or subspace)");
}

bool RunReport::complete() const {
  return std::all_of(slices.begin(), slices.end(), [](const SliceRecord& r) { return r.error.empty(); });
}

std::size_t RunReport::total_matvecs() const {
  std::size_t s = bound_matvecs + dos_matvecs;
  for (const auto& r : slices) s += r.matvecs + r.rq_matvecs;
  return s;
}

double RunReport::max_residual() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.residual);
  return m;
}

std::size_t merge_duplicates(std::vector<EigResult>& pairs, const std::vector<double>& boundaries, double d) {
  const double near = 1e-10 * d;
  auto at_boundary = [&](double x) {
    return std::any_of(boundaries.begin(), boundaries.end(), [&](double b) { return std::abs(x - b) <= near; });
  };
  std::vector<bool> drop(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (drop[i] || !at_boundary(pairs[i].lambda)) continue;
    for (std::size_t j = i + 1; j < pairs.size() && pairs[j].lambda - pairs[i].lambda <= 1e-8; ++j) {
      if (drop[j] || pairs[j].slice_id == pairs[i].slice_id || !at_boundary(pairs[j].lambda)) continue;
      if (std::abs(pairs[i].vector.dot(pairs[j].vector)) >= 0.9) drop[j] = true;
    }
  }
  std::size_t removed = 0;
  std::vector<EigResult> kept;
  kept.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (drop[i])
      ++removed;
    else
      kept.push_back(std::move(pairs[i]));
  }
  pairs = std::move(kept);
  return removed;
}

RunReport run_solve(const SparseSymMatrix& a, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(cfg.xi < cfg.eta)) throw UsageError("interval must satisfy lo < hi");
  if (cfg.threads < 1) throw UsageError("threads must be at least 1");
  if (!(cfg.tol > 0.0)) throw UsageError("tol must be positive");

  RunReport rep;
  rep.map = cfg.bounds ? *cfg.bounds
                       : estimate_bounds(a, std::min<std::size_t>(cfg.bound_steps, a.n()),
                                         derive_seed(cfg.seed, kBoundStream), &rep.bound_matvecs);
  if (cfg.xi < rep.map.lo || cfg.eta > rep.map.hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "interval [%g, %g] is not inside the spectrum bounds [%g, %g]", cfg.xi, cfg.eta,
                  rep.map.lo, rep.map.hi);
    throw UsageError(buf);
  }

  const DOSCurve dos = kpm_dos(a, rep.map, cfg.dos_degree, cfg.dos_vectors, derive_seed(cfg.seed, kDosStream),
                               &rep.dos_matvecs);
  const std::size_t ns = cfg.nslices ? *cfg.nslices : auto_slice_count(dos, cfg.xi, cfg.eta);
  if (ns == 1) {
    rep.plan.bounds = {cfg.xi, cfg.eta};
    rep.plan.counts = {std::max<std::size_t>(estimate_count(dos, cfg.xi, cfg.eta), 1)};
    rep.plan.total_estimate = rep.plan.counts[0];
  } else {
    rep.plan = plan_slices(dos, cfg.xi, cfg.eta, ns);
  }

  std::vector<SliceOutcome> outcomes(ns);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ns;)
      outcomes[i] = solve_slice(a, cfg, rep.map, static_cast<int>(i), rep.plan.lo(i), rep.plan.hi(i),
                                rep.plan.counts[i]);
  };
  const std::size_t nthreads = std::min(cfg.threads, ns);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  for (auto& o : outcomes) {
    rep.slices.push_back(o.record);
    for (auto& p : o.pairs) rep.pairs.push_back(std::move(p));
  }
  std::stable_sort(rep.pairs.begin(), rep.pairs.end(),
                   [](const EigResult& x, const EigResult& y) { return x.lambda < y.lambda; });
  rep.duplicates_removed = merge_duplicates(rep.pairs, rep.plan.bounds, rep.map.d);
  for (auto& r : rep.slices) r.count = 0;
  for (const auto& p : rep.pairs) ++rep.slices[static_cast<std::size_t>(p.slice_id)].count;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string report_json(const RunReport& rep, int indent) {
  using nlohmann::json;
  json j;
  j["bounds"] = {{"lo", rep.map.lo}, {"hi", rep.map.hi}};
  j["plan"] = {{"boundaries", rep.plan.bounds}, {"estimates", rep.plan.counts}, {"total_estimate", rep.plan.total_estimate}};
  json slices = json::array();
  std::size_t iters = 0, mv = 0, rq = 0, count = 0;
  double mvs = 0.0, ts = 0.0, rmax = 0.0, rsum = 0.0;
  for (const auto& r : rep.slices) {
    json s = {{"slice_id", r.slice_id},
              {"interval", {r.lo, r.hi}},
              {"nev_estimate", r.nev_estimate},
              {"deg", r.degree},
              {"gamma", r.gamma},
              {"bar", r.bar},
              {"iter", r.iterations},
              {"matvecs", r.matvecs},
              {"rq_matvecs", r.rq_matvecs},
              {"restarts", r.restarts},
              {"matvec_seconds", r.matvec_seconds},
              {"total_seconds", r.total_seconds},
              {"residual_max", r.residual_max},
              {"residual_avg", r.residual_avg},
              {"count", r.count}};
    if (!r.error.empty()) {
      s["error"] = r.error;
      s["unconverged"] = r.unconverged;
    }
    slices.push_back(std::move(s));
    iters += r.iterations;
    mv += r.matvecs;
    rq += r.rq_matvecs;
    count += r.count;
    mvs += r.matvec_seconds;
    ts += r.total_seconds;
    rmax = std::max(rmax, r.residual_max);
    rsum += r.residual_avg * static_cast<double>(r.count);
  }
  j["slices"] = std::move(slices);
  j["totals"] = {{"iter", iters},
                 {"matvecs", mv},
                 {"rq_matvecs", rq},
                 {"bound_matvecs", rep.bound_matvecs},
                 {"dos_matvecs", rep.dos_matvecs},
                 {"matvec_seconds", mvs},
                 {"slice_seconds", ts},
                 {"wall_seconds", rep.wall_seconds},
                 {"residual_max", rmax},
                 {"residual_avg", count ? rsum / static_cast<double>(count) : 0.0},
                 {"count", count},
                 {"duplicates_removed", rep.duplicates_removed},
                 {"complete", rep.complete()}};
  return j.dump(indent);
}

void write_eigen_csv(std::ostream& out, const std::vector<EigResult>& pairs) {
  out << "slice_id,eigenvalue,residual\n";
  char buf[96];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", p.slice_id, p.lambda, p.residual);
    out << buf;
  }
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("truncated vector file", 0);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_vectors_binary(const std::string& path, const std::vector<EigResult>& pairs, std::size_t n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kVectorMagic, 8);
  put_u64(out, n);
  put_u64(out, pairs.size());
  for (const auto& p : pairs) {
    if (static_cast<std::size_t>(p.vector.size()) != n) throw UsageError("vector length does not match n");
    for (Eigen::Index i = 0; i < p.vector.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(p.vector[i]));
  }
  if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<Vector> read_vectors_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kVectorMagic, 8) != 0) throw ParseError("bad vector file magic", 0);
  const auto n = get_u64(in);
  const auto count = get_u64(in);
  std::vector<Vector> v(count, Vector(static_cast<Eigen::Index>(n)));
  for (auto& col : v)
    for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = std::bit_cast<double>(get_u64(in));
  return v;
}

OracleDiff compare_with_oracle(const std::vector<EigResult>& pairs, const std::vector<double>& oracle,
                               double value_tol, double residual_tol) {
  OracleDiff diff;
  std::vector<const EigResult*> sorted;
  for (const auto& p : pairs) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->lambda < y->lambda; });
  std::size_t i = 0, j = 0;
  while (i < sorted.size() || j < oracle.size()) {
    if (i < sorted.size() && j < oracle.size() && std::abs(sorted[i]->lambda - oracle[j]) <= value_tol) {
      ++i;
      ++j;
    } else if (j >= oracle.size() || (i < sorted.size() && sorted[i]->lambda < oracle[j])) {
      diff.spurious.emplace_back(sorted[i]->slice_id, sorted[i]->lambda);
      ++i;
    } else {
      diff.missed.push_back(oracle[j]);
      ++j;
    }
  }
  for (const auto* p : sorted)
    if (!(p->residual <= residual_tol)) diff.bad_residual.emplace_back(p->slice_id, p->lambda);
  return diff;
}

void write_filter_curve(std::ostream& out, const PolyFilter& filter, const SpectralMap& map, int npts) {
  if (npts < 2) throw UsageError("curve needs at least two points");
  char buf[128];
  out << "t\tx\trho\n";
  for (int i = 0; i < npts; ++i) {
    const double t = -1.0 + 2.0 * i / (npts - 1);
    std::snprintf(buf, sizeof buf, "%.10f\t%.12g\t%.12g\n", t, map.from_reference(t), filter(t));
    out << buf;
  }
}

}  // namespace sliceig
