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


#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "forster/decomposition.hpp"
#include "forster/eigen.hpp"
#include "forster/errors.hpp"
#include "forster/forster.hpp"
#include "forster/generators.hpp"
#include "forster/learner.hpp"
#include "forster/rounding.hpp"
#include "io.hpp"

namespace forster::cli {
namespace {

using io::Json;
namespace fs = std::filesystem;

// Input problems that are the caller's fault rather than the algorithm's.
bool IsUsageError(ErrorKind kind) {
  return kind == ErrorKind::kParseError || kind == ErrorKind::kBadSpec ||
         kind == ErrorKind::kZeroVector;
}

struct Common {
  std::uint64_t seed = 0;
  std::string mode;
  std::string output;
  bool timing = false;
};

void AddCommon(CLI::App* app, Common& c, bool with_mode = true) {
  app->add_option("--seed", c.seed, "64-bit seed for all randomness");
  if (with_mode) {
    app->add_option("--mode", c.mode, "theory or practical (default: $FORSTER_MODE or practical)")
        ->check(CLI::IsMember({"theory", "practical"}));
  }
  app->add_option("--output", c.output, "Write the JSON report here as well as to stdout");
  app->add_flag("--timing", c.timing, "Include wall time in the report");
}

Mode ResolveMode(const std::string& flag) {
  if (!flag.empty()) return ParseMode(flag);
  if (const char* env = std::getenv("FORSTER_MODE"); env != nullptr && *env != '\0') {
    try {
      return ParseMode(env);
    } catch (const Error&) {
      throw Error(ErrorKind::kBadSpec, std::string("FORSTER_MODE must be theory or practical, got '") +
                                           env + "'");
    }
  }
  return Mode::kPractical;
}

Json Header(std::string_view subcommand, std::uint64_t seed) {
  return {{"subcommand", subcommand}, {"seed", seed}};
}

Json EchoForster(const ForsterConfig& cfg, const ForsterParams& p) {
  return {{"epsilon", p.epsilon},
          {"mode", ModeName(p.mode)},
          {"constant", p.constant},
          {"gamma", p.gamma},
          {"eta", p.eta},
          {"delta", p.delta},
          {"zeta", p.zeta},
          {"alpha_case1", p.alpha_case1},
          {"target_potential", p.target},
          {"max_iters", p.max_iters},
          {"eigen_retries", p.eigen_retries},
          {"line_search_probes", p.line_search_probes},
          {"round_between_steps", cfg.round_between_steps}};
}

Json StepsJson(const std::vector<ImproveStep>& steps) {
  Json out = Json::array();
  for (const auto& s : steps) {
    out.push_back({{"case", StepCaseName(s.kind)},
                   {"k", s.k},
                   {"v_dim", s.v_dim},
                   {"gap", s.gap},
                   {"beta", s.beta},
                   {"alpha", s.alpha},
                   {"alpha_nominal", s.alpha_nominal},
                   {"potential_before", s.potential_before},
                   {"potential_after", s.potential_after}});
  }
  return out;
}

Json OutcomeJson(const ForsterOutcome& o) {
  Json j;
  if (o.status == OutcomeStatus::kTransform) {
    j["status"] = "transform";
    j["matrix"] = io::ToJson(o.transform.matrix());
  } else {
    j["status"] = "dense_subspace";
    j["subspace_basis"] = io::ToJson(Matrix(o.certificate.subspace.basis().transpose()));
    j["members"] = o.certificate.members;
  }
  j["iterations"] = o.iterations;
  j["final_potential"] = o.final_potential;
  j["potential_trace"] = o.potential_trace;
  j["roundings_applied"] = o.roundings_applied;
  j["steps"] = StepsJson(o.steps);
  return j;
}

struct TransformOpts {
  Common common;
  std::string input;
  double epsilon = 0.25;
  std::int64_t max_iters = 0;
  bool no_rounding = false;
};

void AddTransformFlags(CLI::App* app, TransformOpts& o) {
  app->add_option("--input", o.input, "Point set (CSV or JSON)")->required();
  app->add_option("--epsilon", o.epsilon, "Accuracy of the transform")
      ->check(CLI::Range(0.0, 1.0).description("in (0, 1)"));
  app->add_option("--max-iters", o.max_iters, "Iteration cap (0 = mode default)");
  app->add_flag("--no-rounding", o.no_rounding, "Skip rounding between improvement steps");
  AddCommon(app, o.common);
}

ForsterConfig ForsterConfigFrom(const TransformOpts& o) {
  ForsterConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.mode = ResolveMode(o.common.mode);
  cfg.seed = o.common.seed;
  cfg.max_iters = o.max_iters;
  cfg.round_between_steps = !o.no_rounding;
  return cfg;
}

Json RunTransform(const TransformOpts& o, Json& report) {
  const PointSet x = io::ReadPoints(o.input);
  const ForsterConfig cfg = ForsterConfigFrom(o);
  report["input"] = o.input;
  report["config_echo"] = EchoForster(cfg, ResolveParams(cfg, x.n(), x.d()));
  report.update(OutcomeJson(ForsterTransform(x, cfg)));
  return report;
}

Json RunDecompose(const TransformOpts& o, Json& report) {
  const PointSet x = io::ReadPoints(o.input);
  const ForsterConfig cfg = ForsterConfigFrom(o);
  report["input"] = o.input;
  report["config_echo"] = EchoForster(cfg, ResolveParams(cfg, x.n(), x.d()));
  const ForsterDecomposition dec = ForsterSubspace(x, cfg);
  report["status"] = "decomposition";
  report["subspace_dim"] = dec.v.dim();
  report["subspace_basis"] = io::ToJson(dec.embed);
  report["members"] = dec.members;
  report["matrix"] = io::ToJson(dec.transform.matrix());
  report["depth"] = dec.depth;
  report["iterations"] = dec.outcome.iterations;
  report["final_potential"] = dec.outcome.final_potential;
  report["potential_trace"] = dec.outcome.potential_trace;
  return report;
}

struct RoundOpts {
  Common common;
  std::string matrix;
  std::string points;
  double zeta = 1e-3;
  double threshold = 0.0;
};

Json RunRound(const RoundOpts& o, Json& report) {
  const Json doc = io::ReadJson(o.matrix);
  const Transform a(io::MatrixFromJson(doc.is_object() ? doc.at("matrix") : doc));
  const PointSet x = io::ReadPoints(o.points);
  if (x.d() != a.dim()) throw Error(ErrorKind::kParseError, "matrix and points disagree on d");
  RoundConfig cfg;
  cfg.zeta = o.zeta;
  cfg.threshold = o.threshold;
  cfg.eigen.seed = o.common.seed;
  cfg.eigen.mode = ResolveMode(o.common.mode);
  const RoundResult r = RoundTransform(a, x, cfg);
  report["config_echo"] = {{"zeta", cfg.zeta},
                           {"threshold", cfg.threshold > 0.0 ? cfg.threshold
                                                             : std::pow(x.d() / cfg.zeta, 6)},
                           {"max_rounds", cfg.max_rounds},
                           {"mode", ModeName(cfg.eigen.mode)},
                           {"eigen_accuracy", cfg.eigen.accuracy},
                           {"eigen_failure_prob", cfg.eigen.failure_prob}};
  report["matrix"] = io::ToJson(r.transform.matrix());
  report["kappa_before"] = r.kappa_before;
  report["kappa_after"] = r.kappa_after;
  report["max_drift"] = r.max_drift;
  report["scale"] = r.scale;
  report["rounds"] = r.rounds;
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"kappa_before", s.kappa_before},
                     {"kappa_after", s.kappa_after},
                     {"gap", s.gap},
                     {"g", s.g},
                     {"rho", s.rho},
                     {"delta", s.delta},
                     {"drift", s.drift},
                     {"drift_bound", s.drift_bound}});
  }
  report["steps"] = std::move(steps);
  return report;
}

struct GenOpts {
  Common common;
  std::string spec;
  int n = 0;
  int d = 0;
  std::string truth;
};

Json TruthJson(const GeneratedData& g, const GenOpts& o) {
  Json j = {{"spec", g.truth.spec}, {"seed", o.common.seed}, {"n", o.n}, {"d", o.d}};
  if (g.truth.halfspace.size() > 0) {
    j["halfspace"] = io::ToJson(g.truth.halfspace);
    j["threshold"] = 0.0;
    j["margin"] = g.truth.margin;
  }
  if (g.truth.planted_basis.cols() > 0) {
    j["planted_basis"] = io::ToJson(Matrix(g.truth.planted_basis.transpose()));
    j["planted_members"] = g.truth.planted_members;
  }
  if (!g.truth.flipped.empty()) j["flipped"] = g.truth.flipped;
  return j;
}

Json RunGen(const GenOpts& o, Json& report) {
  const GeneratedData g = Generate(o.spec, o.n, o.d, o.common.seed);
  fs::path truth = o.truth;
  if (truth.empty()) truth = fs::path(o.common.output).replace_extension(".truth.json");
  io::WritePointsCsv(o.common.output, g.points);
  io::WriteText(truth, io::Dump(TruthJson(g, o)));
  report["config_echo"] = {{"spec", o.spec}, {"n", o.n}, {"d", o.d}};
  report["points"] = o.common.output;
  report["truth"] = truth.string();
  report["labeled"] = g.points.labeled();
  return report;
}

struct LearnOpts {
  Common common;
  std::string train;
  std::string oracle;
  int d = 0;
  double epsilon = 0.1;
  double delta = 0.1;
  double constant = 10.0;
  std::int64_t samples = 0;
  int max_rounds = 0;
  std::string model_out;
};

Json RunLearn(const LearnOpts& o, Json& report) {
  LearnConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.delta = o.delta;
  cfg.mode = ResolveMode(o.common.mode);
  cfg.constant = o.constant;
  cfg.samples_per_round = o.samples;
  cfg.max_rounds = o.max_rounds;
  cfg.seed = o.common.seed;
  cfg.forster.mode = cfg.mode;

  Oracle oracle;
  int d = o.d;
  if (!o.train.empty()) {
    PointSet data = io::ReadPoints(o.train, io::Labels::kRequired);
    d = data.d();
    oracle = EmpiricalOracle(std::move(data));
  } else {
    constexpr std::string_view kPrefix = "synthetic:";
    if (o.oracle.rfind(kPrefix, 0) != 0) {
      throw Error(ErrorKind::kBadSpec, "--oracle must look like synthetic:<spec>");
    }
    if (d < 1) throw Error(ErrorKind::kBadSpec, "--oracle needs --d");
    const std::string spec = o.oracle.substr(kPrefix.size());
    Generate(spec, 1, d, 0);  // Validate before drawing.
    oracle = [spec, d](std::int64_t count, Rng& rng) {
      return Generate(spec, static_cast<int>(count), d, rng.Next()).points;
    };
  }

  const LearnReport r = LearnHalfspace(oracle, d, cfg);
  report["config_echo"] = {{"source", o.train.empty() ? o.oracle : o.train},
                           {"d", d},
                           {"epsilon", cfg.epsilon},
                           {"delta", cfg.delta},
                           {"mode", ModeName(cfg.mode)},
                           {"constant", cfg.constant},
                           {"samples_per_round", r.samples_per_round},
                           {"round_budget", r.round_budget},
                           {"forster_epsilon", 0.5}};
  Json rounds = Json::array();
  for (const auto& round : r.rounds) {
    rounds.push_back({{"drawn", round.drawn},
                      {"uncovered", round.uncovered},
                      {"subspace_dim", round.subspace_dim},
                      {"train_coverage", round.train_coverage},
                      {"perceptron_updates", round.perceptron_updates}});
  }
  report["rounds"] = std::move(rounds);
  report["stages"] = r.model.stages().size();
  const Json model = io::ModelToJson(r.model);
  if (!o.model_out.empty()) {
    io::WriteText(o.model_out, io::Dump(model));
    report["model"] = o.model_out;
  } else {
    report["model"] = model;
  }
  return report;
}

struct EvalOpts {
  Common common;
  std::string model;
  std::string test;
};

Json RunEval(const EvalOpts& o, Json& report) {
  const DecisionList model = io::ModelFromJson(io::ReadJson(o.model));
  const PointSet t = io::ReadPoints(o.test, io::Labels::kRequired);
  if (t.d() != model.ambient_d()) throw Error(ErrorKind::kParseError, "model and test disagree on d");
  const Evaluation e = Evaluate(model, t);
  report["config_echo"] = {{"model", o.model}, {"test", o.test}, {"stages", model.stages().size()}};
  report["count"] = e.count;
  report["error_rate"] = e.error_rate;
  report["abstain_rate"] = e.abstain_rate;
  report["error_plus_abstain"] = e.error_rate + e.abstain_rate;
  report["coverage_mistake_rate"] = e.coverage_mistake_rate;
  return report;
}

struct BenchOpts {
  Common common;
  int d = 6;
  double kappa = 1e6;
  double eta = 0.05;
  double delta = 0.01;
  int directions = 10000;
  std::int64_t power = 0;
};

// Q diag(lambda) Q^T with Q Haar-distributed and log-spaced eigenvalues in
// [1/kappa, 1].
Matrix RandomPsd(int d, double kappa, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.Normal();
  }
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector lambda(d);
  for (int i = 0; i < d; ++i) {
    const double t = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
    lambda(i) = std::pow(kappa, -t);
  }
  return q * lambda.asDiagonal() * q.transpose();
}

Json RunEigenBench(const BenchOpts& o, Json& report) {
  Rng rng = Rng::Substream(o.common.seed, 0);
  const Matrix m = RandomPsd(o.d, o.kappa, rng);
  EigenConfig cfg;
  cfg.accuracy = o.eta;
  cfg.failure_prob = o.delta;
  cfg.mode = ResolveMode(o.common.mode);
  cfg.power = o.power;
  cfg.seed = SplitMix64(o.common.seed + 1);
  report["config_echo"] = {{"d", o.d},
                           {"kappa", o.kappa},
                           {"eta", o.eta},
                           {"delta", o.delta},
                           {"directions", o.directions},
                           {"mode", ModeName(cfg.mode)},
                           {"range", DefaultRange(o.d, o.delta)},
                           {"power_override", o.power}};
  try {
    const EigenApprox e = ApproxEigendecomposition(m, cfg);
    const VerifyResult v = VerifyMultiplicative(m, e, o.eta, o.directions, SplitMix64(o.common.seed + 2));
    report["worst_ratio"] = v.worst_ratio;
    report["t_used"] = e.power_used;
    report["t_nominal"] = e.power_nominal;
    report["passed"] = v.passed;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kEigenFailed) throw;
    report["worst_ratio"] = nullptr;
    report["t_used"] = cfg.max_power;
    report["passed"] = false;
  }
  return report;
}

void Emit(const Json& report, const std::string& output, std::ostream& out) {
  const std::string text = io::Dump(report);
  if (!output.empty()) io::WriteText(output, text);
  out << text;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate Forster transforms, dense-subspace certificates and halfspace learning"};
  app.name("forster_cli");
  app.require_subcommand(1);

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic point set");
  gen_cmd->add_option("--spec", gen.spec,
                      "sphere-uniform | gaussian | dense-subspace:k:fraction | "
                      "margin-halfspace:margin:w_seed | rcn:eta:<spec>")
      ->required();
  gen_cmd->add_option("--n", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d", gen.d, "Dimension")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--truth", gen.truth, "Ground-truth sidecar (default: <output>.truth.json)");
  AddCommon(gen_cmd, gen.common, false);
  gen_cmd->get_option("--output")->required()->description("CSV file to write");

  TransformOpts transform;
  auto* transform_cmd = app.add_subcommand("transform", "Approximate Forster transform or certificate");
  AddTransformFlags(transform_cmd, transform);

  TransformOpts decompose;
  auto* decompose_cmd = app.add_subcommand("decompose", "Subspace with a Forster transform");
  AddTransformFlags(decompose_cmd, decompose);

  RoundOpts round;
  auto* round_cmd = app.add_subcommand("round", "Round a transform to integer entries");
  round_cmd->add_option("--input-matrix", round.matrix, "JSON matrix or transform report")->required();
  round_cmd->add_option("--points", round.points, "Point set (CSV or JSON)")->required();
  round_cmd->add_option("--zeta", round.zeta, "Drift budget")->check(CLI::PositiveNumber);
  round_cmd->add_option("--threshold", round.threshold, "Condition threshold (0 = (d/zeta)^6)");
  AddCommon(round_cmd, round.common);

  LearnOpts learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn a decision list of partial halfspaces");
  auto* train_opt = learn_cmd->add_option("--train", learn.train, "Labeled CSV or JSON sample");
  auto* oracle_opt = learn_cmd->add_option("--oracle", learn.oracle, "synthetic:<labeled spec>");
  train_opt->excludes(oracle_opt);
  learn_cmd->add_option("--d", learn.d, "Dimension for --oracle");
  learn_cmd->add_option("--epsilon", learn.epsilon)->check(CLI::Range(0.0, 1.0));
  learn_cmd->add_option("--delta", learn.delta)->check(CLI::Range(0.0, 1.0));
  learn_cmd->add_option("--constant", learn.constant, "Constant in the round and sample budgets");
  learn_cmd->add_option("--samples-per-round", learn.samples, "0 = derived from the constant");
  learn_cmd->add_option("--max-rounds", learn.max_rounds, "0 = derived from the constant");
  learn_cmd->add_option("--model-out", learn.model_out, "Write the model JSON here");
  AddCommon(learn_cmd, learn.common);

  EvalOpts eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on labeled data");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--test", eval.test)->required();
  AddCommon(eval_cmd, eval.common, false);

  BenchOpts bench;
  auto* bench_cmd = app.add_subcommand("eigen-bench", "Check the multiplicative eigen guarantee");
  bench_cmd->add_option("--d", bench.d)->check(CLI::Range(1, 512));
  bench_cmd->add_option("--kappa", bench.kappa)->check(CLI::Range(1.0, 1e300));
  bench_cmd->add_option("--eta", bench.eta)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--delta", bench.delta)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--directions", bench.directions)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--power", bench.power, "Fixed iteration count (0 = per mode)");
  AddCommon(bench_cmd, bench.common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, err, err);
    return kExitUsage;
  }
  if (learn_cmd->parsed() && learn.train.empty() && learn.oracle.empty()) {
    err << "learn: one of --train or --oracle is required\n";
    return kExitUsage;
  }

  std::string name;
  std::uint64_t seed = 0;
  std::string output;
  bool timing = false;
  std::function<Json(Json&)> body;
  auto bind = [&](CLI::App* cmd, const Common& c, std::function<Json(Json&)> fn) {
    if (!cmd->parsed()) return;
    name = cmd->get_name();
    seed = c.seed;
    output = c.output;
    timing = c.timing;
    body = std::move(fn);
  };
  bind(gen_cmd, gen.common, [&](Json& r) { return RunGen(gen, r); });
  bind(transform_cmd, transform.common, [&](Json& r) { return RunTransform(transform, r); });
  bind(decompose_cmd, decompose.common, [&](Json& r) { return RunDecompose(decompose, r); });
  bind(round_cmd, round.common, [&](Json& r) { return RunRound(round, r); });
  bind(learn_cmd, learn.common, [&](Json& r) { return RunLearn(learn, r); });
  bind(eval_cmd, eval.common, [&](Json& r) { return RunEval(eval, r); });
  bind(bench_cmd, bench.common, [&](Json& r) { return RunEigenBench(bench, r); });
  // gen's --output names the CSV; its report only goes to stdout.
  if (gen_cmd->parsed()) output.clear();

  Json report = Header(name, seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(report);
  } catch (const Error& e) {
    if (IsUsageError(e.kind())) {
      err << name << ": " << e.what() << "\n";
      return kExitUsage;
    }
    report["error"] = {{"kind", ErrorKindName(e.kind())}, {"message", e.what()}};
    if (const auto* cap = dynamic_cast<const IterationCapError*>(&e)) {
      report["potential_trace"] = cap->trace();
    }
    Emit(report, output, out);
    return kExitAlgorithmic;
  }
  if (timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report["wall_time_seconds"] = elapsed.count();
  }
  Emit(report, output, out);
  return kExitOk;
}

}  // namespace forster::cli
