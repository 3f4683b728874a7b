#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gapq/cli.hpp"
#include "gapq/error.hpp"
#include "json.hpp"

namespace gapq::cli {

using nlohmann::json;

namespace {

constexpr double kHour = 3600.0;

// Walks one JSON object, remembering which keys were read so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) fail(key, "is required");
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0)) fail(key, "must be > 0");
    return x;
  }

  unsigned count(const std::string& key, unsigned min) {
    const auto& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < min) fail(key, "must be an integer >= " + std::to_string(min));
    return v.get<unsigned>();
  }

  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) fail(key, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json& array(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array");
    return v;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) fail(key, "is not a recognised key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : child(key);
    throw ConfigError(where + ": " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

PhaseSpec read_phase(Reader r) {
  PhaseSpec s;
  const auto& g = r.array("generator_per_s");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g[i].is_array()) r.fail("generator_per_s", "row " + std::to_string(i) + " must be an array");
    std::vector<double> row;
    for (const auto& x : g[i]) {
      if (!x.is_number()) r.fail("generator_per_s", "entries must be numbers");
      row.push_back(x.get<double>());
    }
    if (row.size() != g.size()) r.fail("generator_per_s", "must be square");
    s.generator_per_s.push_back(std::move(row));
  }
  s.rates_vph = r.numbers("rates_vph");
  if (s.rates_vph.size() != s.generator_per_s.size())
    r.fail("rates_vph", "must have one entry per phase (" + std::to_string(s.generator_per_s.size()) + ")");
  if (r.has("mean_flow_vph")) s.mean_flow_vph = r.positive("mean_flow_vph");
  r.finish();
  return s;
}

BehaviorSpec read_behavior(Reader r, const std::string& path) {
  BehaviorSpec s;
  try {
    s.kind = behavior_from_string(r.string("kind"));
  } catch (const ModelError&) {
    r.fail("kind", "must be one of B1, B2, B3");
  }
  const auto& gaps = r.array("gaps");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    Reader g(gaps[i], indexed(path + ".gaps", i));
    s.gaps.push_back({g.positive("T_s"), g.positive("p")});
    g.finish();
  }
  r.finish();
  return s;
}

BatchSpec read_batch(Reader r, const std::string& path) {
  BatchSpec s;
  s.label = r.string("label");
  if (r.has("uniform_range") == r.has("pmf")) r.fail("", "give exactly one of uniform_range, pmf");
  if (r.has("uniform_range")) {
    const auto range = r.numbers("uniform_range");
    if (range.size() != 2 || range[0] < 1 || range[1] < range[0] || range[0] != std::floor(range[0]) ||
        range[1] != std::floor(range[1]))
      r.fail("uniform_range", "must be [lo, hi] with integers 1 <= lo <= hi");
    s.uniform_range = std::pair{static_cast<unsigned>(range[0]), static_cast<unsigned>(range[1])};
  } else {
    const auto& pmf = r.array("pmf");
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      Reader m(pmf[i], indexed(path + ".pmf", i));
      s.pmf.push_back({m.count("k", 1), m.positive("p")});
      m.finish();
    }
  }
  if (r.has("lambda_bph")) s.lambda_bph = r.positive("lambda_bph");
  r.finish();
  return s;
}

template <class Fn>
auto validated(const std::string& path, Fn&& build) {
  try {
    return build();
  } catch (const ModelError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json to_json(const BehaviorSpec& b) {
  json gaps = json::array();
  for (const auto& g : b.gaps) gaps.push_back({{"T_s", g.T}, {"p", g.p}});
  return {{"kind", std::string(to_string(b.kind))}, {"gaps", gaps}};
}

json to_json(const BatchSpec& b) {
  json j{{"label", b.label}};
  if (b.uniform_range) {
    j["uniform_range"] = {b.uniform_range->first, b.uniform_range->second};
  } else {
    json pmf = json::array();
    for (const auto& m : b.pmf) pmf.push_back({{"k", m.k}, {"p", m.p}});
    j["pmf"] = pmf;
  }
  if (b.lambda_bph) j["lambda_bph"] = *b.lambda_bph;
  return j;
}

}  // namespace

bool BehaviorSpec::operator==(const BehaviorSpec& o) const {
  return kind == o.kind &&
         std::equal(gaps.begin(), gaps.end(), o.gaps.begin(), o.gaps.end(),
                    [](const Gap& a, const Gap& b) { return a.T == b.T && a.p == b.p; });
}

bool BatchSpec::operator==(const BatchSpec& o) const {
  return label == o.label && uniform_range == o.uniform_range && lambda_bph == o.lambda_bph &&
         std::equal(pmf.begin(), pmf.end(), o.pmf.begin(), o.pmf.end(),
                    [](const BatchMass& a, const BatchMass& b) { return a.k == b.k && a.p == b.p; });
}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::analyze: return "analyze";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::approx: return "approx";
    case ExperimentKind::table1: return "table1";
  }
  return "analyze";
}

ExperimentKind experiment_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::analyze, ExperimentKind::sweep, ExperimentKind::simulate, ExperimentKind::approx,
                 ExperimentKind::table1})
    if (s == to_string(k)) return k;
  throw ConfigError("experiment: unknown kind '" + std::string(s) +
                    "' (expected analyze, sweep, simulate, approx or table1)");
}

PhaseProcess build_process(const PhaseSpec& s) {
  const std::size_t n = s.generator_per_s.size();
  Matrix<double> Q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Q(i, j) = s.generator_per_s[i][j];
  std::vector<double> q;
  for (double r : s.rates_vph) q.push_back(r / kHour);
  PhaseProcess p(std::move(Q), std::move(q));
  return s.mean_flow_vph ? p.with_mean_flow(*s.mean_flow_vph / kHour) : p;
}

BehaviorModel build_behavior(const BehaviorSpec& s) { return BehaviorModel(s.kind, s.gaps); }

BatchDistribution build_batch(const BatchSpec& s) {
  if (s.uniform_range) return BatchDistribution::uniform(s.uniform_range->first, s.uniform_range->second);
  return BatchDistribution(s.pmf);
}

std::vector<Scenario> scenarios(const ExperimentSpec& spec) {
  const auto process = build_process(spec.model.phase);
  const double qbar = mean_flow_rate(process);
  const auto behaviors = spec.behaviors.empty() ? std::vector{spec.model.behavior} : spec.behaviors;
  const auto batches = spec.batches.empty() ? std::vector{spec.model.batch} : spec.batches;
  std::vector<Scenario> out;
  for (const auto& bt : batches)
    for (const auto& bh : behaviors)
      out.push_back({spec.name, bt.label, process, build_behavior(bh), build_batch(bt),
                     bt.lambda_bph.value_or(spec.model.lambda_bph) / kHour, qbar});
  return out;
}

ExperimentSpec parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
  }
  Reader r(j, "");
  ExperimentSpec s;
  s.name = r.string("name");
  s.kind = experiment_from_string(r.string("experiment"));

  {
    Reader m(r.at("model"), "model");
    s.model.phase = read_phase(Reader(m.at("phase_process"), "model.phase_process"));
    s.model.behavior = read_behavior(Reader(m.at("behavior"), "model.behavior"), "model.behavior");
    s.model.batch = read_batch(Reader(m.at("batch"), "model.batch"), "model.batch");
    s.model.lambda_bph = m.positive("lambda_bph");
    m.finish();
  }
  if (r.has("variants")) {
    Reader v(r.at("variants"), "variants");
    if (v.has("behaviors")) {
      const auto& a = v.array("behaviors");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto path = indexed("variants.behaviors", i);
        s.behaviors.push_back(read_behavior(Reader(a[i], path), path));
      }
    }
    if (v.has("batches")) {
      const auto& a = v.array("batches");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto path = indexed("variants.batches", i);
        s.batches.push_back(read_batch(Reader(a[i], path), path));
      }
    }
    v.finish();
  }
  if (r.has("sweep")) {
    Reader w(r.at("sweep"), "sweep");
    SweepSpec sw;
    const auto axis = w.string("axis");
    if (axis == "qbar_vph") sw.axis = SweepAxis::qbar_vph;
    else if (axis == "lambda_bph") sw.axis = SweepAxis::lambda_bph;
    else w.fail("axis", "must be qbar_vph or lambda_bph");
    sw.grid = w.numbers("grid");
    if (sw.grid.empty()) w.fail("grid", "must not be empty");
    for (std::size_t i = 0; i < sw.grid.size(); ++i) {
      if (!(sw.grid[i] > 0)) w.fail("grid", "values must be > 0");
      if (i > 0 && !(sw.grid[i] > sw.grid[i - 1])) w.fail("grid", "must be strictly increasing");
    }
    if (w.has("without_platooning")) sw.without_platooning = w.boolean("without_platooning");
    w.finish();
    s.sweep = sw;
  }
  if (r.has("simulation")) {
    Reader w(r.at("simulation"), "simulation");
    SimulationSpec sim;
    sim.measure_s = w.positive("measure_s");
    sim.warmup_s = w.has("warmup_s") ? w.positive("warmup_s") : 0.1 * sim.measure_s;
    if (w.has("replications")) sim.replications = w.count("replications", 1);
    if (w.has("seed")) {
      const auto& v = w.at("seed");
      if (!v.is_number_unsigned()) w.fail("seed", "must be a non-negative integer");
      sim.seed = v.get<std::uint64_t>();
    }
    w.finish();
    s.simulation = sim;
  }
  if (r.has("approx")) {
    Reader w(r.at("approx"), "approx");
    ApproxSpec a;
    a.delta = w.number("delta");
    if (a.delta < 0) w.fail("delta", "must be >= 0");
    a.eta = w.positive("eta");
    a.rho_grid = w.numbers("rho_grid");
    for (std::size_t i = 0; i < a.rho_grid.size(); ++i) {
      if (!(a.rho_grid[i] > 0 && a.rho_grid[i] < 1)) w.fail("rho_grid", "values must lie in (0, 1)");
      if (i > 0 && !(a.rho_grid[i] > a.rho_grid[i - 1])) w.fail("rho_grid", "must be strictly increasing");
    }
    w.finish();
    s.approx = a;
  }
  if (r.has("table1")) {
    Reader w(r.at("table1"), "table1");
    s.table1_qbar_vph = w.numbers("qbar_vph");
    for (double q : s.table1_qbar_vph)
      if (!(q > 0)) w.fail("qbar_vph", "values must be > 0");
    w.finish();
  }
  if (r.has("jet_order")) s.jet_order = r.count("jet_order", 2);
  r.finish();

  // Build every model object once so that invalid parameters surface here.
  validated("model.phase_process", [&] { return build_process(s.model.phase); });
  validated("model.behavior", [&] { return build_behavior(s.model.behavior); });
  validated("model.batch", [&] { return build_batch(s.model.batch); });
  for (std::size_t i = 0; i < s.behaviors.size(); ++i)
    validated(indexed("variants.behaviors", i), [&] { return build_behavior(s.behaviors[i]); });
  for (std::size_t i = 0; i < s.batches.size(); ++i)
    validated(indexed("variants.batches", i), [&] { return build_batch(s.batches[i]); });

  switch (s.kind) {
    case ExperimentKind::sweep:
      if (!s.sweep) throw ConfigError("sweep: required for experiment 'sweep'");
      break;
    case ExperimentKind::simulate:
      if (!s.simulation) throw ConfigError("simulation: required for experiment 'simulate'");
      break;
    case ExperimentKind::approx:
      if (!s.approx) throw ConfigError("approx: required for experiment 'approx'");
      break;
    case ExperimentKind::table1:
      if (s.table1_qbar_vph.empty()) throw ConfigError("table1: required for experiment 'table1'");
      break;
    case ExperimentKind::analyze: break;
  }

  // Analytic single-point runs must be stable as configured.
  if (s.kind == ExperimentKind::analyze || s.kind == ExperimentKind::simulate) {
    for (const auto& sc : scenarios(s)) {
      const ServiceTransform st(sc.process, sc.behavior, sc.lambda, 2);
      const double rho = sc.lambda * sc.batch.mean() * service_moments(st).mean;
      if (!(rho < 1))
        throw UnstableError("model: offered load rho = " + std::to_string(rho) + " >= 1 for behavior " +
                                std::string(to_string(sc.behavior.kind())) + ", batch '" + sc.batch_label + "'",
                            rho);
    }
  }
  return s;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  j["experiment"] = std::string(to_string(s.kind));
  json phase{{"generator_per_s", s.model.phase.generator_per_s}, {"rates_vph", s.model.phase.rates_vph}};
  if (s.model.phase.mean_flow_vph) phase["mean_flow_vph"] = *s.model.phase.mean_flow_vph;
  j["model"] = {{"phase_process", phase},
                {"behavior", to_json(s.model.behavior)},
                {"batch", to_json(s.model.batch)},
                {"lambda_bph", s.model.lambda_bph}};
  if (!s.behaviors.empty() || !s.batches.empty()) {
    json v = json::object();
    if (!s.behaviors.empty()) {
      v["behaviors"] = json::array();
      for (const auto& b : s.behaviors) v["behaviors"].push_back(to_json(b));
    }
    if (!s.batches.empty()) {
      v["batches"] = json::array();
      for (const auto& b : s.batches) v["batches"].push_back(to_json(b));
    }
    j["variants"] = v;
  }
  if (s.sweep)
    j["sweep"] = {{"axis", s.sweep->axis == SweepAxis::qbar_vph ? "qbar_vph" : "lambda_bph"},
                  {"grid", s.sweep->grid},
                  {"without_platooning", s.sweep->without_platooning}};
  if (s.simulation)
    j["simulation"] = {{"warmup_s", s.simulation->warmup_s},
                       {"measure_s", s.simulation->measure_s},
                       {"replications", s.simulation->replications},
                       {"seed", s.simulation->seed}};
  if (s.approx) j["approx"] = {{"delta", s.approx->delta}, {"eta", s.approx->eta}, {"rho_grid", s.approx->rho_grid}};
  if (!s.table1_qbar_vph.empty()) j["table1"] = {{"qbar_vph", s.table1_qbar_vph}};
  j["jet_order"] = s.jet_order;
  return j.dump(2) + "\n";
}

}  // namespace gapq::cli
