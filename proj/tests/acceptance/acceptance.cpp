/*
 * Copyright 2026 The forster Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Acceptance run: one PASS/FAIL line per criterion. Every criterion builds a
// JSON record of its per-instance results (no timings); the determinism
// criterion re-runs them all and compares the records byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "forster/eigen.hpp"
#include "forster/forster.hpp"
#include "forster/generators.hpp"
#include "forster/learner.hpp"
#include "forster/rounding.hpp"
#include "io.hpp"
#include "oracles.hpp"

namespace {

using forster::Matrix;
using forster::PointSet;
using forster::Rng;
using forster::Vector;
using forster::io::Json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 20261016;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Verdict {
  bool pass = false;
  std::string summary;
  Json record;
};

std::string Format(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// Forster correctness on sphere instances, plus the potential trace of every
// run for the monotonicity criterion.
struct SphereRuns {
  Verdict correctness;
  Verdict monotone;
};

SphereRuns RunSphereInstances() {
  SphereRuns out;
  int in_band = 0;
  int monotone = 0;
  double worst_time = 0.0;
  std::int64_t accepted = 0;
  Json runs = Json::array();
  Json traces = Json::array();
  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::Substream(kSeed, static_cast<std::uint64_t>(i));
    const int d = 2 + i % 7;
    const int n = static_cast<int>(rng.Integer(2 * d, 100));
    const PointSet x = forster::SphereUniform(n, d, rng);
    forster::ForsterConfig cfg;
    cfg.epsilon = 0.25;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto start = Clock::now();
    bool ok = false;
    Json run = {{"d", d}, {"n", n}};
    try {
      const auto outcome = forster::ForsterTransform(x, cfg);
      const double t = Seconds(start);
      worst_time = std::max(worst_time, t);
      if (outcome.status == forster::OutcomeStatus::kTransform) {
        const Vector ev = oracle::Eigenvalues(oracle::Moment(outcome.transform.matrix(), x.points()));
        const double lo = (1 - cfg.epsilon) / d;
        const double hi = (1 + cfg.epsilon) / d;
        ok = ev(0) >= lo && ev(d - 1) <= hi && t < 60.0;
        run["min_eigenvalue"] = ev(0);
        run["max_eigenvalue"] = ev(d - 1);
      }
      run["status"] = outcome.status == forster::OutcomeStatus::kTransform ? "transform" : "dense_subspace";
      run["iterations"] = outcome.iterations;
      run["matrix"] = forster::io::ToJson(outcome.transform.matrix());

      bool mono = true;
      const auto& trace = outcome.potential_trace;
      for (size_t s = 0; s < trace.size(); ++s) {
        mono = mono && trace[s] >= 1.0 / d - 1e-9;
        if (s > 0) mono = mono && trace[s] < trace[s - 1];
      }
      accepted += static_cast<std::int64_t>(trace.size() > 0 ? trace.size() - 1 : 0);
      monotone += mono ? 1 : 0;
      traces.push_back(trace);
    } catch (const forster::Error& e) {
      run["error"] = e.what();
      traces.push_back(nullptr);
    }
    in_band += ok ? 1 : 0;
    run["in_band"] = ok;
    runs.push_back(std::move(run));
  }
  out.correctness.pass = in_band == 50;
  out.correctness.summary = Format("%.0f/50 transforms with all eigenvalues in [(1-e)/d, (1+e)/d]; slowest %.3f s (limit 60 s)",
                                   in_band, worst_time);
  out.correctness.record = std::move(runs);
  out.monotone.pass = monotone == 50;
  out.monotone.summary = Format("%.0f/50 traces strictly decreasing and >= 1/d - 1e-9 over %.0f accepted iterations",
                                monotone, static_cast<double>(accepted));
  out.monotone.record = std::move(traces);
  return out;
}

// All nonzero vectors of {-1, 0, 1}^d.
std::vector<Vector> CubeVectors(int d) {
  std::vector<Vector> out;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int c = 0; c < total; ++c) {
    Vector v(d);
    int t = c;
    for (int i = 0; i < d; ++i) {
      v(i) = t % 3 - 1;
      t /= 3;
    }
    if (v.norm() > 0) out.push_back(v);
  }
  return out;
}

void Multisets(int alphabet, int size, int first, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == size) {
    out.push_back(current);
    return;
  }
  for (int a = first; a < alphabet; ++a) {
    current.push_back(a);
    Multisets(alphabet, size, a, current, out);
    current.pop_back();
  }
}

Verdict RunMicroCertificates() {
  Verdict v;
  int agree = 0;
  int total = 0;
  int certificates = 0;
  int verified = 0;
  Json record = Json::array();
  for (int d : {2, 3}) {
    const std::vector<Vector> cube = CubeVectors(d);
    std::vector<std::vector<int>> sets;
    for (int size = 1; size <= 6; ++size) {
      std::vector<int> current;
      Multisets(static_cast<int>(cube.size()), size, 0, current, sets);
    }
    if (sets.size() > 5000) {
      // Seeded sample of 5000 distinct multisets.
      Rng rng = Rng::Substream(kSeed, 1000 + static_cast<std::uint64_t>(d));
      std::shuffle(sets.begin(), sets.end(), rng.engine());
      sets.resize(5000);
      std::sort(sets.begin(), sets.end());
    }
    for (size_t s = 0; s < sets.size(); ++s) {
      const auto& picks = sets[s];
      const int n = static_cast<int>(picks.size());
      Matrix pts(n, d);
      for (int i = 0; i < n; ++i) pts.row(i) = cube[static_cast<size_t>(picks[i])].transpose();
      const PointSet x(pts);
      const bool truth = oracle::ExhaustiveDenseSubspace(pts).exists;
      forster::ForsterConfig cfg;
      // Below 1/(n d), a dense subspace keeps the potential above the target.
      cfg.epsilon = 0.5 / (n * d);
      cfg.seed = s;
      bool got = false;
      bool ok = false;
      try {
        const auto outcome = forster::ForsterTransform(x, cfg);
        got = outcome.status == forster::OutcomeStatus::kDenseSubspace;
        ok = got == truth;
        if (got) {
          ++certificates;
          // Direct count with the membership tolerance.
          const auto& w = outcome.certificate.subspace;
          int count = 0;
          for (int i = 0; i < n; ++i) {
            const Vector p = x.point(i);
            count += (p - w.Project(p)).norm() <= 1e-9 * p.norm() ? 1 : 0;
          }
          const bool dense = count * d > n * w.dim() && w.dim() > 0 && w.dim() < d;
          verified += dense ? 1 : 0;
          ok = ok && dense;
        }
      } catch (const forster::Error& e) {
        record.push_back({{"d", d}, {"set", picks}, {"error", e.what()}});
      }
      ++total;
      agree += ok ? 1 : 0;
      if (!ok) record.push_back({{"d", d}, {"set", picks}, {"truth", truth}, {"certificate", got}});
    }
    record.push_back({{"d", d}, {"instances", sets.size()}});
  }
  v.pass = agree == total;
  v.summary = Format("%.0f/%.0f micro datasets agree with the exhaustive oracle; %.0f/%.0f certificates verified by count",
                     agree, total, verified, certificates);
  v.record = std::move(record);
  return v;
}

Verdict RunEigenGuarantee() {
  Verdict v;
  int passed = 0;
  int silent = 0;
  int reported_failures = 0;
  Json record = Json::array();
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::Substream(kSeed, 2000 + static_cast<std::uint64_t>(i));
    const int d = 1 + i % 8;
    const double kappa = std::pow(10.0, 12.0 * rng.Uniform());
    oracle::Gen gen(rng.Next());
    const Matrix m = gen.Psd(d, kappa);
    forster::EigenConfig cfg;
    cfg.accuracy = 0.05;
    cfg.failure_prob = 0.01;
    cfg.seed = static_cast<std::uint64_t>(i);
    Json run = {{"d", d}, {"kappa", kappa}};
    try {
      const auto e = forster::ApproxEigendecomposition(m, cfg);
      const auto check = forster::VerifyMultiplicative(m, e, 0.05, 10000, 7000 + static_cast<std::uint64_t>(i));
      // Exact worst ratio: spectral radius of M^{-1/2} (M - M^) M^{-1/2}.
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      const Vector inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const Matrix w = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
      const Matrix rel = w * (m - forster::Reconstruct(e)) * w;
      const double exact = oracle::Eigenvalues(0.5 * (rel + rel.transpose())).cwiseAbs().maxCoeff();
      passed += check.passed ? 1 : 0;
      // A decomposition the library accepted must really be good.
      const bool bad_accepted = e.verified && exact > 0.05 * (1 + 1e-6);
      silent += bad_accepted ? 1 : 0;
      reported_failures += e.verified ? 0 : 1;
      run["sampled_ratio"] = check.worst_ratio;
      run["exact_ratio"] = exact;
      run["power"] = e.power_used;
      run["passed"] = check.passed;
    } catch (const forster::Error& e) {
      ++reported_failures;
      run["error"] = e.what();
    }
    record.push_back(std::move(run));
  }
  v.pass = passed >= 95 && silent == 0;
  v.summary = Format("%.0f/100 pass verify_multiplicative with 1e4 directions at eta=0.05 (need 95); %.0f reported failures, %.0f silent",
                     passed, reported_failures, silent);
  v.record = std::move(record);
  return v;
}

Verdict RunRounding() {
  Verdict v;
  int instances_ok = 0;
  int steps = 0;
  int steps_ok = 0;
  double worst_drift = 0.0;
  Json record = Json::array();
  for (int i = 0; i < 20; ++i) {
    Rng rng = Rng::Substream(kSeed, 3000 + static_cast<std::uint64_t>(i));
    oracle::Gen gen(rng.Next());
    const int d = 2 + i % 4;
    const double kappa = std::pow(10.0, 8 + 1.5 * (i % 5) / 4.0);
    // Singular values: a cluster near 1 and a cluster near 1/kappa.
    const int large = 1 + i % (d - 1);
    Vector sigma(d);
    for (int j = 0; j < d; ++j) sigma(j) = (1 + gen.Uniform()) * (j < large ? 1.0 : 1.0 / kappa);
    const Matrix a = gen.WithSingularValues(sigma);
    Matrix pts(4 * d, d);
    for (int r = 0; r < pts.rows(); ++r) {
      do {
        for (int c = 0; c < d; ++c) pts(r, c) = gen.Integer(-8, 8);
      } while (pts.row(r).norm() == 0.0);
    }
    const PointSet x(pts);
    forster::RoundConfig cfg;
    cfg.zeta = 1e-3;
    // Stop while the remaining gap still dwarfs 1/(rho delta zeta).
    cfg.threshold = 1e7;
    cfg.eigen.seed = static_cast<std::uint64_t>(i);
    Json run = {{"d", d}, {"kappa", oracle::Kappa(a)}};
    try {
      const auto r = forster::RoundTransform(forster::Transform(a), x, cfg);
      bool ok = r.max_drift <= cfg.zeta;
      Json step_log = Json::array();
      for (const auto& s : r.steps) {
        ++steps;
        const double kb = oracle::Kappa(s.before);
        const double ka = oracle::Kappa(s.after);
        const bool kappa_ok = ka <= 30 * s.delta * kb * (1 + 1e-6);
        const bool drift_ok = s.drift <= s.drift_bound * (1 + 1e-6);
        steps_ok += kappa_ok && drift_ok ? 1 : 0;
        ok = ok && kappa_ok && drift_ok;
        step_log.push_back({{"kappa_before", kb}, {"kappa_after", ka}, {"delta", s.delta},
                            {"drift", s.drift}, {"drift_bound", s.drift_bound}});
      }
      worst_drift = std::max(worst_drift, r.max_drift);
      run["max_drift"] = r.max_drift;
      run["steps"] = std::move(step_log);
      run["kappa_after"] = oracle::Kappa(r.transform.matrix());
      instances_ok += ok ? 1 : 0;
    } catch (const forster::Error& e) {
      run["error"] = e.what();
    }
    record.push_back(std::move(run));
  }
  v.pass = instances_ok == 20 && steps > 0;
  v.summary = Format("%.0f/20 instances within bounds; %.0f/%.0f reduce steps meet the kappa and drift bounds; worst end-to-end drift %.2e (zeta 1e-3)",
                     instances_ok, steps_ok, steps, worst_drift);
  v.record = std::move(record);
  return v;
}

Verdict RunPerceptron() {
  Verdict v;
  int ok_sets = 0;
  double worst_fraction = 0.0;
  Json record = Json::array();
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 10;
    const double gamma = i % 2 == 0 ? 0.1 : 0.3;
    const std::string spec = "margin-halfspace:" + std::string(i % 2 == 0 ? "0.1" : "0.3") + ":" + std::to_string(i);
    const auto data = forster::Generate(spec, 200, d, kSeed + static_cast<std::uint64_t>(i));
    Json run = {{"d", d}, {"gamma", gamma}};
    try {
      const auto r = forster::MarginPerceptron(data.points, gamma);
      bool contract = true;
      for (int p = 0; p < data.points.n(); ++p) {
        const Vector x = data.points.point(p);
        const double dot = r.weight.dot(x);
        if (std::abs(dot) >= gamma * r.weight.norm() * x.norm()) {
          contract = contract && (dot > 0 ? 1 : -1) == data.points.label(p);
        }
      }
      const double limit = 100.0 * d / (gamma * gamma);
      const bool within = static_cast<double>(r.total_updates) <= limit;
      worst_fraction = std::max(worst_fraction, r.total_updates / limit);
      ok_sets += contract && within ? 1 : 0;
      run["total_updates"] = r.total_updates;
      run["start"] = r.start;
      run["weight"] = forster::io::ToJson(r.weight);
    } catch (const forster::Error& e) {
      run["error"] = e.what();
    }
    record.push_back(std::move(run));
  }
  v.pass = ok_sets == 50;
  v.summary = Format("%.0f/50 sets: contract holds and total updates <= 100 d / gamma^2 (largest use %.1f%% of the bound)",
                     ok_sets, 100 * worst_fraction);
  v.record = std::move(record);
  return v;
}

Verdict RunPartialClassifier() {
  Verdict v;
  int ok_sets = 0;
  double worst_slack = 1e300;
  Json record = Json::array();
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 9;
    const auto data = forster::Generate("margin-halfspace:0:" + std::to_string(i), 40 + 4 * i, d,
                                        kSeed + 100 + static_cast<std::uint64_t>(i));
    const PointSet& s = data.points;
    forster::ForsterConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    Json run = {{"d", d}, {"n", s.n()}};
    try {
      const auto fit = forster::FitPartialClassifier(s, cfg);
      int covered = 0;
      int mistakes = 0;
      for (int p = 0; p < s.n(); ++p) {
        const int y = fit.classifier.Predict(s.point(p));
        if (y == 0) continue;
        ++covered;
        mistakes += y != s.label(p) ? 1 : 0;
      }
      const double fraction = static_cast<double>(covered) / s.n();
      worst_slack = std::min(worst_slack, fraction * 4 * d);
      ok_sets += fraction >= 1.0 / (4 * d) && mistakes == 0 ? 1 : 0;
      run["covered"] = covered;
      run["mistakes"] = mistakes;
      run["subspace_dim"] = fit.classifier.region().dim();
    } catch (const forster::Error& e) {
      run["error"] = e.what();
    }
    record.push_back(std::move(run));
  }
  v.pass = ok_sets == 50;
  v.summary = Format("%.0f/50 sets cover >= 1/(4d) with zero covered mistakes (smallest coverage is %.1fx the bound)",
                     ok_sets, worst_slack);
  v.record = std::move(record);
  return v;
}

Verdict RunLearning() {
  Verdict v;
  const auto start = Clock::now();
  int good = 0;
  double worst = 0.0;
  Json record = Json::array();
  for (int t = 0; t < 20; ++t) {
    Rng rng = Rng::Substream(kSeed, 4000 + static_cast<std::uint64_t>(t));
    const Vector w = rng.UnitSphere(3);
    const forster::Oracle oracle = [w](std::int64_t count, Rng& r) {
      return forster::LabeledSphere(static_cast<int>(count), w, r);
    };
    forster::LearnConfig cfg;
    cfg.epsilon = 0.1;
    cfg.delta = 0.1;
    cfg.samples_per_round = 20000;
    cfg.seed = rng.Next();
    Json run = {{"w", forster::io::ToJson(w)}};
    try {
      const auto report = forster::LearnHalfspace(oracle, 3, cfg);
      Rng test_rng = Rng::Substream(kSeed, 5000 + static_cast<std::uint64_t>(t));
      const PointSet test = forster::LabeledSphere(100000, w, test_rng);
      const auto e = forster::Evaluate(report.model, test);
      const double loss = e.error_rate + e.abstain_rate;
      worst = std::max(worst, loss);
      good += loss <= 0.1 ? 1 : 0;
      run["rounds"] = report.rounds.size();
      run["error_rate"] = e.error_rate;
      run["abstain_rate"] = e.abstain_rate;
    } catch (const forster::Error& e) {
      run["error"] = e.what();
    }
    record.push_back(std::move(run));
  }
  const double elapsed = Seconds(start);
  v.pass = good >= 18 && elapsed < 600.0;
  v.summary = Format("%.0f/20 trials with error + abstain <= 0.1 on 1e5 held-out points (need 18); worst %.4f; %.1f s (limit 600 s)",
                     good, worst, elapsed);
  v.record = std::move(record);
  return v;
}

std::string CliReports() {
  // Byte-identical CLI reports for the same flags and seed.
  const auto dir = std::filesystem::temp_directory_path() / "forster_acceptance";
  std::filesystem::create_directories(dir);
  const std::string pts = (dir / "pts.csv").string();
  std::ostringstream sink;
  std::string all;
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"gen", "--spec", "rcn:0.1:margin-halfspace:0.2:4", "--n", "500", "--d", "4",
                                 "--seed", "3", "--output", pts},
        std::vector<std::string>{"transform", "--input", pts, "--seed", "3"},
        std::vector<std::string>{"decompose", "--input", pts, "--seed", "3"},
        std::vector<std::string>{"eigen-bench", "--d", "6", "--kappa", "1e10", "--seed", "3"}}) {
    std::ostringstream out;
    forster::cli::Run(args, out, sink);
    all += out.str();
    all += forster::io::ReadText(pts);
  }
  std::filesystem::remove_all(dir);
  return all;
}

using Verdicts = std::map<std::string, Verdict>;

Verdicts RunAll(const std::set<std::string>& only) {
  const auto wanted = [&](const std::string& name) { return only.empty() || only.contains(name); };
  Verdicts out;
  if (wanted("AC1") || wanted("AC3")) {
    auto sphere = RunSphereInstances();
    out["AC1"] = std::move(sphere.correctness);
    out["AC3"] = std::move(sphere.monotone);
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> rest = {
      {"AC2", RunMicroCertificates}, {"AC4", RunEigenGuarantee},    {"AC5", RunRounding},
      {"AC6", RunPerceptron},        {"AC7", RunPartialClassifier}, {"AC8", RunLearning},
  };
  for (const auto& [name, run] : rest) {
    if (wanted(name)) out[name] = run();
  }
  return out;
}

}  // namespace

// Usage: acceptance [--verbose] [--report <file>] [AC1 AC5 ...]
int main(int argc, char** argv) {
  bool verbose = false;
  std::string report_path;
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--verbose") {
      verbose = true;
    } else if (arg == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      only.insert(arg);
    }
  }
  std::cout << "acceptance seed " << kSeed << "\n";
  Verdicts verdicts = RunAll(only);

  if (only.empty() || only.contains("AC9")) {
    const Verdicts again = RunAll(only);
    int identical = 0;
    std::string differing;
    for (const auto& [name, verdict] : verdicts) {
      if (forster::io::Dump(verdict.record) == forster::io::Dump(again.at(name).record)) {
        ++identical;
      } else {
        differing += " [" + name + " differs]";
      }
    }
    const bool cli_same = CliReports() == CliReports();
    Verdict det;
    det.pass = identical == static_cast<int>(verdicts.size()) && cli_same;
    det.summary = Format("%.0f/%.0f criterion reports byte-identical on re-run; CLI reports ", identical,
                         static_cast<double>(verdicts.size())) +
                  (cli_same ? "identical" : "differ") + differing;
    verdicts["AC9"] = std::move(det);
  }

  bool all = true;
  std::string lines;
  for (const auto& [name, verdict] : verdicts) {
    lines += name + " " + (verdict.pass ? "PASS" : "FAIL") + "  " + verdict.summary + "\n";
    all = all && verdict.pass;
  }
  std::cout << lines;
  if (verbose) {
    for (const auto& [name, verdict] : verdicts) {
      if (!verdict.pass) std::cout << name << " record:\n" << forster::io::Dump(verdict.record);
    }
  }
  if (!report_path.empty()) forster::io::WriteText(report_path, lines);
  return all ? 0 : 1;
}
