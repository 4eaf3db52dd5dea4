// Copyright 2026 The lneflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lneflow/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lneflow/csv.hpp"
#include "lneflow/diffgeo.hpp"
#include "lneflow/error.hpp"
#include "lneflow/lne_geometry.hpp"
#include "lneflow/rng.hpp"

#ifndef LNEFLOW_VERSION
#define LNEFLOW_VERSION "dev"
#endif

namespace lneflow::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSubcommandNames[] = {"ricci-sim", "train", "inverse-approx",
                                            "divergence-check", "curvature-check"};
constexpr const char* kBlockNames[] = {"ricci_sim", "train", "inverse_approx",
                                       "divergence_check", "curvature_check"};

const char* block_name(Subcommand s) { return kBlockNames[static_cast<int>(s)]; }

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first `"key" :` after `from`; 0 if not found.
int line_of_key(const std::string& text, const std::string& key, std::size_t from = 0) {
  const std::string quoted = "\"" + key + "\"";
  for (std::size_t pos = text.find(quoted, from); pos != std::string::npos;
       pos = text.find(quoted, pos + 1)) {
    std::size_t q = pos + quoted.size();
    while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q]))) ++q;
    if (q < text.size() && text[q] == ':') return line_at_offset(text, pos);
  }
  return 0;
}

std::size_t offset_of_key(const std::string& text, const std::string& key) {
  const std::string quoted = "\"" + key + "\"";
  const std::size_t pos = text.find(quoted);
  return pos == std::string::npos ? 0 : pos;
}

// Typed, consuming access to one JSON object; finish() rejects the keys that
// were never read.
class Block {
 public:
  Block(const json& obj, std::string path, const std::string& text, std::size_t origin)
      : obj_(obj), path_(std::move(path)), text_(text), origin_(origin) {
    if (!obj_.is_object()) throw ConfigError(path_ + " must be a JSON object", line_at_offset(text_, origin_));
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key, double def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_number()) fail(key, "must be a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = take(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number()) fail(key, "must be a number");
    return v->get<double>();
  }

  int integer(const std::string& key, int def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_number_integer()) fail(key, "must be an integer");
    const auto x = v->get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(key, "is out of range");
    return static_cast<int>(x);
  }

  std::optional<std::uint64_t> unsigned64(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) fail(key, "must be a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(key, "must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_string()) fail(key, "must be a string");
    return v->get<std::string>();
  }

  template <typename T>
  std::vector<T> list(const std::string& key, const std::vector<T>& def) {
    const json* v = take(key);
    if (!v) return def;
    if (!v->is_array() || v->empty()) fail(key, "must be a non-empty array");
    std::vector<T> out;
    for (const auto& e : *v) {
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) fail(key, "must contain integers");
      } else {
        if (!e.is_number()) fail(key, "must contain numbers");
      }
      out.push_back(e.get<T>());
    }
    return out;
  }

  Block child(const std::string& key) {
    const json* v = take(key);
    static const json kEmpty = json::object();
    const std::size_t at = v ? offset_of_key(text_.substr(origin_), key) + origin_ : origin_;
    return Block(v ? *v : kEmpty, path_ + "." + key, text_, at);
  }

  void finish() const {
    for (const auto& [k, _] : obj_.items())
      if (!seen_.count(k)) fail(k, "is not a recognized key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(path_ + "." + key + " " + what, line_of_key(text_, key, origin_));
  }

  int line() const { return line_at_offset(text_, origin_); }

 private:
  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  const std::string& text_;
  std::size_t origin_;
  std::set<std::string> seen_;
};

template <typename E>
E parse_enum(Block& b, const std::string& key, E def,
             std::initializer_list<std::pair<const char*, E>> options) {
  const char* def_name = nullptr;
  for (const auto& [name, value] : options)
    if (value == def) def_name = name;
  const std::string s = b.string(key, def_name ? def_name : "");
  for (const auto& [name, value] : options)
    if (s == name) return value;
  b.fail(key, "has unknown value '" + s + "'");
}

constexpr std::initializer_list<std::pair<const char*, flow::ProfileKind>> kProfileKinds = {
    {"fourier_mode", flow::ProfileKind::kFourierMode},
    {"gaussian_bump", flow::ProfileKind::kGaussianBump},
    {"random_smooth", flow::ProfileKind::kRandomSmooth}};
constexpr std::initializer_list<std::pair<const char*, flow::TensorDirection>> kDirections = {
    {"diagonal", flow::TensorDirection::kDiagonal},
    {"offdiagonal", flow::TensorDirection::kOffDiagonal},
    {"trace", flow::TensorDirection::kTrace}};
constexpr std::initializer_list<std::pair<const char*, optim::ProbeMode>> kProbes = {
    {"update_direction", optim::ProbeMode::kUpdateDirection},
    {"fixed_random", optim::ProbeMode::kFixedRandom}};
constexpr std::initializer_list<std::pair<const char*, optim::FlowKind>> kFlows = {
    {"weak", optim::FlowKind::kWeak},
    {"exact", optim::FlowKind::kExact},
    {"euclidean", optim::FlowKind::kEuclidean}};
constexpr std::initializer_list<std::pair<const char*, data::DatasetId>> kDatasets = {
    {"blobs", data::DatasetId::kBlobs}, {"moons", data::DatasetId::kMoons}};

template <typename E>
std::string enum_name(E v, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, value] : options)
    if (value == v) return name;
  return "";
}

// Runs a module validate() and re-raises its contract message as a config
// error anchored at the block.
template <typename F>
void validate_block(const Block& b, F&& f) {
  try {
    f();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what(), b.line());
  }
}

json parse_ricci(Block& b, ExperimentConfig& cfg) {
  flow::FlowConfig& r = cfg.ricci;
  r.dim = b.integer("dim", r.dim);
  r.points = b.integer("points", r.points);
  r.length = b.number("length", r.length);
  r.epsilon = b.number("epsilon", r.epsilon);
  r.t_max = b.number("t_max", r.t_max);
  r.tol = b.number("tol", r.tol);
  r.blowup_threshold = b.number("blowup_threshold", r.blowup_threshold);
  r.dt = b.optional_number("dt");
  cfg.dump_every = b.integer("dump_every", cfg.dump_every);
  {
    Block p = b.child("profile");
    r.profile.kind = parse_enum(p, "kind", r.profile.kind, kProfileKinds);
    r.profile.wavenumber = p.integer("wavenumber", r.profile.wavenumber);
    r.profile.direction = parse_enum(p, "direction", r.profile.direction, kDirections);
    r.profile.width = p.number("width", r.profile.width);
    p.finish();
  }
  if (r.profile.kind == flow::ProfileKind::kRandomSmooth) {
    if (!cfg.seed) throw ConfigError("random_smooth profile requires a top-level seed", b.line());
    r.profile.seed = *cfg.seed;
  }
  if (cfg.dump_every < 0) b.fail("dump_every", "must be >= 0");
  if (r.epsilon < 0.0) b.fail("epsilon", "must be >= 0");
  validate_block(b, [&] { r.validate(); });
  const double dt = r.dt.value_or(flow::cfl_bound(r.shape()));
  return {{"dim", r.dim},
          {"points", r.points},
          {"length", r.length},
          {"epsilon", r.epsilon},
          {"t_max", r.t_max},
          {"tol", r.tol},
          {"blowup_threshold", r.blowup_threshold},
          {"dt", dt},
          {"dump_every", cfg.dump_every},
          {"profile",
           {{"kind", enum_name(r.profile.kind, kProfileKinds)},
            {"wavenumber", r.profile.wavenumber},
            {"direction", enum_name(r.profile.direction, kDirections)},
            {"width", r.profile.width}}}};
}

json parse_train(Block& b, ExperimentConfig& cfg) {
  optim::TrainConfig& t = cfg.train;
  t.tau = b.number("tau", t.tau);
  t.learning_rate = b.number("learning_rate", t.learning_rate);
  t.steps = b.integer("steps", t.steps);
  t.dataset = parse_enum(b, "dataset", t.dataset, kDatasets);
  t.probe = parse_enum(b, "probe", t.probe, kProbes);
  t.radius_every = b.integer("radius_every", t.radius_every);
  t.layers = b.list<int>("layers", t.layers);
  t.flow = parse_enum(b, "flow", t.flow, kFlows);
  t.init_scale = b.number("init_scale", t.init_scale);
  if (!cfg.seed) throw ConfigError("train requires a top-level seed", b.line());
  t.seed = *cfg.seed;
  validate_block(b, [&] { t.validate(); });
  return {{"tau", t.tau},
          {"learning_rate", t.learning_rate},
          {"steps", t.steps},
          {"dataset", enum_name(t.dataset, kDatasets)},
          {"probe", enum_name(t.probe, kProbes)},
          {"radius_every", t.radius_every},
          {"layers", t.layers},
          {"flow", enum_name(t.flow, kFlows)},
          {"init_scale", t.init_scale}};
}

json parse_inverse(Block& b, ExperimentConfig& cfg) {
  strong::InverseApproxConfig& c = cfg.inverse;
  c.dim = b.integer("dim", c.dim);
  c.tau = b.number("tau", c.tau);
  c.xi_range = b.number("xi_range", c.xi_range);
  c.max_u_norm_sq = b.number("max_u_norm_sq", c.max_u_norm_sq);
  c.train_samples = b.integer("train_samples", c.train_samples);
  c.heldout_samples = b.integer("heldout_samples", c.heldout_samples);
  c.hidden = b.integer("hidden", c.hidden);
  c.init_scale = b.number("init_scale", c.init_scale);
  c.learning_rate = b.number("learning_rate", c.learning_rate);
  c.iterations = b.integer("iterations", c.iterations);
  c.log_every = b.integer("log_every", c.log_every);
  c.identity_only = b.boolean("identity_only", c.identity_only);
  if (!cfg.seed) throw ConfigError("inverse-approx requires a top-level seed", b.line());
  c.seed = *cfg.seed;
  validate_block(b, [&] { c.validate(); });
  return {{"dim", c.dim},
          {"tau", c.tau},
          {"xi_range", c.xi_range},
          {"max_u_norm_sq", c.max_u_norm_sq},
          {"train_samples", c.train_samples},
          {"heldout_samples", c.heldout_samples},
          {"hidden", c.hidden},
          {"init_scale", c.init_scale},
          {"learning_rate", c.learning_rate},
          {"iterations", c.iterations},
          {"log_every", c.log_every},
          {"identity_only", c.identity_only}};
}

json parse_divergence(Block& b, ExperimentConfig& cfg) {
  DivergenceCheckConfig& d = cfg.divergence;
  d.dims = b.list<int>("dims", d.dims);
  d.taus = b.list<double>("taus", d.taus);
  d.pairs_per_cell = b.integer("pairs_per_cell", d.pairs_per_cell);
  d.xi_range = b.number("xi_range", d.xi_range);
  for (int n : d.dims)
    if (n < 1) b.fail("dims", "entries must be >= 1");
  for (double t : d.taus)
    if (!(t > 0.0)) b.fail("taus", "entries must be positive");
  if (d.pairs_per_cell < 1) b.fail("pairs_per_cell", "must be >= 1");
  if (!(d.xi_range > 0.0)) b.fail("xi_range", "must be positive");
  if (!cfg.seed) throw ConfigError("divergence-check requires a top-level seed", b.line());
  return {{"dims", d.dims},
          {"taus", d.taus},
          {"pairs_per_cell", d.pairs_per_cell},
          {"xi_range", d.xi_range}};
}

json parse_curvature(Block& b, ExperimentConfig& cfg) {
  CurvatureCheckConfig& c = cfg.curvature;
  c.resolutions = b.list<int>("resolutions", c.resolutions);
  c.amplitude = b.number("amplitude", c.amplitude);
  c.min_order = b.number("min_order", c.min_order);
  for (int r : c.resolutions)
    if (r < 3) b.fail("resolutions", "entries must be >= 3");
  if (!(c.amplitude >= 0.0) || c.amplitude > 0.5) b.fail("amplitude", "must be in [0, 0.5]");
  return {{"resolutions", c.resolutions},
          {"amplitude", c.amplitude},
          {"min_order", c.min_order}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes via a temporary file and rename, so readers never see a partial file.
void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + (dir_ / name).string());
    files_.push_back(name);
    return os;
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

int run_ricci(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  flow::FlowState state = flow::init_perturbation(cfg.ricci);
  std::function<void(const flow::FlowState&)> observer;
  if (cfg.dump_every > 0) {
    observer = [&](const flow::FlowState& s) {
      if (s.steps() % cfg.dump_every != 0) return;
      auto os = out.open("grid_" + std::to_string(s.steps()) + ".csv");
      diffgeo::write_grid_csv(os, s.metric().perturbation());
    };
  }
  const flow::RunResult result = flow::run(state, cfg.ricci, observer);
  {
    auto os = out.open("history.csv");
    flow::write_history_csv(os, state.history(), result);
  }
  m.verdicts["ricci_sim"] = flow::to_string(result.verdict);
  return result.verdict == flow::Verdict::kSingularityDetected ? kExitSingularity : kExitOk;
}

int run_train(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  const optim::TrainResult r = optim::train(cfg.train);
  {
    auto os = out.open("train.csv");
    CsvWriter csv(os);
    csv.header({"step", "train_loss", "test_acc", "B_r"});
    for (const auto& row : r.rows) {
      csv.field(row.step).field(row.train_loss).field(row.test_acc).field(row.radius);
      csv.end_row();
    }
  }
  {
    auto os = out.open("radius.csv");
    CsvWriter csv(os);
    csv.header({"step", "B_r_update_direction", "B_r_fixed_random", "fallback"});
    for (const auto& row : r.radius_log) {
      csv.field(row.step).field(row.update_direction).field(row.fixed_random);
      csv.field(static_cast<long long>(row.fallback));
      csv.end_row();
    }
  }
  m.verdicts["final_test_acc"] = format_double(r.final_test_acc);
  return kExitOk;
}

int run_inverse(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  const strong::InverseApproxResult r = strong::train_inverse_approximator(cfg.inverse);
  {
    auto os = out.open("inverse_approx.csv");
    CsvWriter csv(os);
    csv.header({"iteration", "loss", "heldout_loss", "max_dev"});
    for (const auto& row : r.report.log) {
      csv.field(row.iteration).field(row.loss).field(row.heldout_loss).field(row.max_dev);
      csv.end_row();
    }
  }
  m.verdicts["heldout_mean_loss"] = format_double(r.report.heldout_mean_loss);
  m.verdicts["max_deviation"] = format_double(r.report.max_deviation);
  m.verdicts["inverse_approx"] = r.report.aborted ? "Aborted" : "Completed";
  return r.report.aborted ? kExitDegenerate : kExitOk;
}

int run_divergence(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  const DivergenceCheckConfig& d = cfg.divergence;
  RandomStream rng = RandomStream::derive(*cfg.seed, "harness.divergence_check");
  auto os = out.open("divergence_check.csv");
  CsvWriter csv(os);
  csv.header({"n", "tau", "pairs", "min_divergence", "max_self_divergence", "violations"});
  long long total_violations = 0;
  for (int n : d.dims) {
    for (double tau : d.taus) {
      double min_d = std::numeric_limits<double>::infinity();
      double max_self = 0.0;
      long long violations = 0;
      for (int k = 0; k < d.pairs_per_cell; ++k) {
        Eigen::VectorXd a(n), b(n);
        for (auto& v : a) v = rng.uniform(-d.xi_range, d.xi_range);
        for (auto& v : b) v = rng.uniform(-d.xi_range, d.xi_range);
        const geometry::CoordPoint pa(a, tau), pb(b, tau);
        const double dv = geometry::divergence(pa, pb);
        const double self = std::abs(geometry::divergence(pb, pb));
        min_d = std::min(min_d, dv);
        max_self = std::max(max_self, self);
        const bool distinct = a != b;
        if (!(dv >= 0.0) || (distinct && dv == 0.0) || !(self < 1e-14)) ++violations;
      }
      csv.field(static_cast<long long>(n)).field(tau).field(static_cast<long long>(d.pairs_per_cell));
      csv.field(min_d).field(max_self).field(violations);
      csv.end_row();
      total_violations += violations;
    }
  }
  m.verdicts["divergence_check"] = total_violations == 0 ? "Pass" : "Fail";
  m.verdicts["violations"] = std::to_string(total_violations);
  return total_violations == 0 ? kExitOk : kExitCheckFailed;
}

int run_curvature(const ExperimentConfig& cfg, OutputSet& out, RunManifest& m) {
  const CurvatureCheckConfig& c = cfg.curvature;
  auto os = out.open("curvature_check.csv");
  CsvWriter csv(os);
  csv.header({"points", "h", "max_error", "order", "flat_max"});
  const double length = 2.0 * std::numbers::pi;
  double prev_err = 0.0;
  int prev_n = 0;
  bool pass = true;
  for (int n : c.resolutions) {
    const auto shape = diffgeo::GridShape::cube(2, n, length);
    // g = exp(2 f) delta with f = a sin x sin y; R = -2 exp(-2 f) lap f.
    diffgeo::SymTensorGrid gamma(shape);
    std::vector<double> exact(shape.size());
    for (std::size_t p = 0; p < shape.size(); ++p) {
      const auto x = shape.position(p);
      const double f = c.amplitude * std::sin(x[0]) * std::sin(x[1]);
      const double e2f = std::exp(2.0 * f);
      gamma(p, 0, 0) = e2f - 1.0;
      gamma(p, 1, 1) = e2f - 1.0;
      exact[p] = -2.0 / e2f * (-2.0 * f);
    }
    const auto fields = diffgeo::curvature_fields(diffgeo::MetricGrid(std::move(gamma)));
    double err = 0.0;
    for (std::size_t p = 0; p < shape.size(); ++p)
      err = std::max(err, std::abs(fields.scalar[p] - exact[p]));

    const auto flat = diffgeo::curvature_fields(diffgeo::MetricGrid(diffgeo::SymTensorGrid(shape)));
    double flat_max = flat.sup_riemann;
    for (double v : flat.scalar) flat_max = std::max(flat_max, std::abs(v));
    if (flat_max != 0.0) pass = false;

    double order = std::numeric_limits<double>::quiet_NaN();
    if (prev_n > 0 && err > 0.0) {
      order = std::log(prev_err / err) / std::log(static_cast<double>(n) / prev_n);
      if (!(order >= c.min_order)) pass = false;
    }
    csv.field(static_cast<long long>(n)).field(shape.spacing(0)).field(err).field(order).field(flat_max);
    csv.end_row();
    prev_err = err;
    prev_n = n;
  }
  m.verdicts["curvature_check"] = pass ? "Pass" : "Fail";
  return pass ? kExitOk : kExitCheckFailed;
}

std::string manifest_json(const RunManifest& m, const ExperimentConfig& cfg) {
  json j;
  j["config_hash"] = m.config_hash;
  j["artifact_version"] = m.artifact_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["verdicts"] = m.verdicts;
  j["outputs"] = m.outputs;
  j["exit_code"] = m.exit_code;
  j["subcommand"] = to_string(cfg.subcommand);
  j["config"] = json::parse(cfg.effective_json);
  if (!m.error.empty()) j["error"] = m.error;
  return j.dump(2) + "\n";
}

}  // namespace

std::string to_string(Subcommand s) { return kSubcommandNames[static_cast<int>(s)]; }

Subcommand subcommand_from_string(const std::string& name) {
  for (int i = 0; i < 5; ++i)
    if (name == kSubcommandNames[i]) return static_cast<Subcommand>(i);
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::string artifact_version() { return LNEFLOW_VERSION; }

ExperimentConfig parse_config(Subcommand sub, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(),
                      line_at_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  ExperimentConfig cfg;
  cfg.subcommand = sub;
  Block top(doc, "config", text, 0);
  const std::string named = top.string("subcommand", to_string(sub));
  if (named != to_string(sub))
    top.fail("subcommand", "is '" + named + "' but the command line asked for '" + to_string(sub) + "'");
  cfg.seed = top.unsigned64("seed");
  cfg.output_dir = top.string("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) top.fail("output_dir", "must not be empty");

  Block block = top.child(block_name(sub));
  json effective_block;
  switch (sub) {
    case Subcommand::kRicciSim:
      effective_block = parse_ricci(block, cfg);
      break;
    case Subcommand::kTrain:
      effective_block = parse_train(block, cfg);
      break;
    case Subcommand::kInverseApprox:
      effective_block = parse_inverse(block, cfg);
      break;
    case Subcommand::kDivergenceCheck:
      effective_block = parse_divergence(block, cfg);
      break;
    case Subcommand::kCurvatureCheck:
      effective_block = parse_curvature(block, cfg);
      break;
  }
  block.finish();
  top.finish();

  json effective;
  effective["subcommand"] = to_string(sub);
  effective["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  effective["output_dir"] = cfg.output_dir;
  effective[block_name(sub)] = effective_block;
  cfg.effective_json = effective.dump();
  cfg.hash = hex64(fnv1a64(cfg.effective_json));
  return cfg;
}

ExperimentConfig parse_config_file(Subcommand sub, const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(sub, ss.str());
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  RunManifest m;
  m.config_hash = cfg.hash;
  m.artifact_version = artifact_version();
  m.started_at = utc_now();

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  OutputSet out(dir);

  int code = kExitOk;
  try {
    switch (cfg.subcommand) {
      case Subcommand::kRicciSim:
        code = run_ricci(cfg, out, m);
        break;
      case Subcommand::kTrain:
        code = run_train(cfg, out, m);
        break;
      case Subcommand::kInverseApprox:
        code = run_inverse(cfg, out, m);
        break;
      case Subcommand::kDivergenceCheck:
        code = run_divergence(cfg, out, m);
        break;
      case Subcommand::kCurvatureCheck:
        code = run_curvature(cfg, out, m);
        break;
    }
  } catch (const ConfigError& e) {
    code = kExitConfig;
    m.error = e.what();
  } catch (const ContractViolation& e) {
    code = kExitConfig;
    m.error = e.what();
  } catch (const DegenerateMetric& e) {
    code = kExitDegenerate;
    m.error = e.what();
  } catch (const NotPositiveDefinite& e) {
    code = kExitDegenerate;
    m.error = e.what();
  } catch (const NumericalFailure& e) {
    code = kExitDegenerate;
    m.error = e.what();
  } catch (const SingularityDetected& e) {
    code = kExitSingularity;
    m.error = e.what();
  }
  if (!m.error.empty()) m.verdicts["error"] = m.error;

  m.outputs = out.files();
  m.outputs.push_back("manifest.json");
  m.exit_code = code;
  m.finished_at = utc_now();
  write_atomically(dir / "manifest.json", manifest_json(m, cfg));
  return {code, m};
}

}  // namespace lneflow::harness
