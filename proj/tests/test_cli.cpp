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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "sliceig/matrix_market.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sliceig");
  std::ostringstream out, err;
  const int code = sliceig::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<int, double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<int, double>> rows;
  while (std::getline(in, line)) {
    int s = 0;
    double v = 0.0, r = 0.0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &s, &v, &r) == 3) rows.emplace_back(s, v);
  }
  return rows;
}

double field(const std::string& text, const std::string& key) {
  auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"solve", "--laplacian", "4", "4", "4"}).code == 2);
  CHECK(run({"solve", "--laplacian", "4", "4", "4", "--interval", "1", "2", "--bogus"}).code == 2);
  CHECK(run({"solve", "--laplacian", "4", "4", "4", "--matrix", "x.mtx", "--interval", "1", "2"}).code == 2);
  CHECK(run({"solve", "--laplacian", "4", "4", "4", "--interval", "2", "1"}).code == 2);
  CHECK(run({"solve", "--interval", "1", "2"}).code == 2);
  CHECK(run({"solve", "--matrix", "does_not_exist.mtx", "--interval", "1", "2"}).code == 2);
  CHECK(run({"check", "--matrix", "x.mtx", "--interval", "1", "2"}).code == 2);
}

TEST_CASE("diagonal file, two slices") {
  {
    std::ofstream f("cli_diag.mtx");
    f << "%%MatrixMarket matrix coordinate real symmetric\n100 100 100\n";
    for (int i = 1; i <= 100; ++i) f << i << ' ' << i << ' ' << i << '\n';
  }
  auto r = run({"solve", "--matrix", "cli_diag.mtx", "--interval", "10.5", "20.5", "--slices", "2", "--out", "cli_diag"});
  CHECK(r.code == 0);
  auto rows = read_csv("cli_diag.csv");
  REQUIRE(rows.size() == 10);
  int per[2] = {0, 0};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].second == doctest::Approx(11.0 + static_cast<double>(i)));
    ++per[rows[i].first];
  }
  CHECK(std::abs(per[0] - 5) <= 2);
  CHECK(std::abs(per[1] - 5) <= 2);
  CHECK(slurp("cli_diag.json").find("\"matvecs\"") != std::string::npos);
  std::remove("cli_diag.mtx");
  std::remove("cli_diag.csv");
  std::remove("cli_diag.json");
}

TEST_CASE("check passes and a loose tolerance is caught") {
  auto ok = run({"check", "--laplacian", "8", "8", "8", "--interval", "5.05", "5.6", "--slices", "2"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("check: OK") != std::string::npos);

  auto bad = run({"check", "--laplacian", "8", "8", "8", "--interval", "5.05", "5.6", "--slices", "2", "--engine", "subspace", "--tol", "0.05"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("MISMATCH") != std::string::npos);
  CHECK(bad.err.find("missed") != std::string::npos);
  CHECK(bad.err.find("(slice ") != std::string::npos);
}

TEST_CASE("thread count gives byte-identical csv") {
  const std::vector<std::string> base = {"solve", "--laplacian", "9", "9", "9", "--interval", "4.03", "5.01",
                                         "--slices", "3", "--seed", "3"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1", "--out", "cli_t1"});
  b.insert(b.end(), {"--threads", "4", "--out", "cli_t4"});
  CHECK(run(a).code == 0);
  CHECK(run(b).code == 0);
  CHECK(slurp("cli_t1.csv") == slurp("cli_t4.csv"));
  CHECK(slurp("cli_t1.csv").size() > 100);
  for (auto p : {"cli_t1.csv", "cli_t1.json", "cli_t4.csv", "cli_t4.json"}) std::remove(p);
}

TEST_CASE("config file with flag override") {
  {
    std::ofstream f("cli_run.cfg");
    f << "# run settings\nlaplacian = 7 7 7\ninterval = 4.55 5.6\nslices = 2\nphi = 0.8\ntol = 1e-9\n";
  }
  auto r = run({"check", "--config", "cli_run.cfg", "--slices", "1"});
  CHECK(r.code == 0);
  // One table row for one slice: header, one slice line, totals.
  CHECK(r.out.find("    1 [") == std::string::npos);
  CHECK(r.out.find("    0 [") != std::string::npos);
  std::remove("cli_run.cfg");
}

TEST_CASE("filter design") {
  SUBCASE("symmetric interval centres at zero") {
    auto r = run({"filter-design", "--bounds", "0", "12", "--interval", "5", "7", "--out", "cli_curve.tsv"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(field(r.out, "gamma")) <= 1e-10);
    std::ifstream in("cli_curve.tsv");
    std::string line;
    std::getline(in, line);
    int rows = 0;
    double best = -1e300, best_t = 0.0;
    double t, x, v;
    while (in >> t >> x >> v) {
      ++rows;
      if (v > best) best = v, best_t = x;
    }
    CHECK(rows == 2001);
    CHECK(best_t >= 5.0);
    CHECK(best_t <= 7.0);
    std::remove("cli_curve.tsv");
  }
  SUBCASE("large laplacian slice") {
    const double e = 6.0 * std::cos(M_PI / 61);
    auto r = run({"filter-design", "--bounds", std::to_string(6.0 - e), std::to_string(6.0 + e), "--interval", "0.6",
                  "0.67568", "--phi", "0.6", "--damping", "sigma", "--out", "cli_curve2.tsv"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(field(r.out, "k") - 172.0) <= 0.05 * 172);
    std::remove("cli_curve2.tsv");
  }
  SUBCASE("degree cap is a numerical failure") {
    auto r = run({"filter-design", "--bounds", "0", "12", "--interval", "5", "5.0000001"});
    CHECK(r.code == 3);
  }
}

TEST_CASE("numerical failure exits with 3 and still writes results") {
  auto r = run({"solve", "--laplacian", "5", "5", "5", "--interval", "5", "5.0000001", "--out", "cli_fail"});
  CHECK(r.code == 3);
  CHECK(r.err.find("slice 0") != std::string::npos);
  CHECK(slurp("cli_fail.csv").rfind("slice_id,eigenvalue,residual", 0) == 0);
  std::remove("cli_fail.csv");
  std::remove("cli_fail.json");
}

TEST_CASE("slice plan and generator") {
  auto g = run({"gen-laplacian", "3", "3", "3", "--out", "cli_lap.mtx"});
  REQUIRE(g.code == 0);
  auto a = sliceig::load_matrix_market("cli_lap.mtx");
  CHECK(a.n() == 27);
  CHECK(a.at(0, 1) == -1.0);
  std::remove("cli_lap.mtx");

  auto p = run({"slice-plan", "--laplacian", "12", "12", "12", "--interval", "4", "6", "--slices", "3"});
  CHECK(p.code == 0);
  CHECK(p.out.find("3 slice(s)") != std::string::npos);
}
