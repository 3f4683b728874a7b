#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gapq/approx.hpp"
#include "gapq/cli.hpp"
#include "gapq/delay.hpp"
#include "gapq/error.hpp"

namespace gapq::cli {

namespace {

constexpr double kHour = 3600.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double offered_load(const PhaseProcess& p, const BehaviorModel& b, const BatchDistribution& batch, double lambda) {
  const ServiceTransform st(p, b, lambda, 2);
  return lambda * batch.mean() * service_moments(st).mean;
}

struct Point {
  double rho = kNaN, EW = kNaN, VarW = kNaN, ES = kNaN, VarS = kNaN;
};

// Exact moments, or NaN moments when the load is at or beyond the stability margin.
Point analytic(const PhaseProcess& p, const BehaviorModel& b, const BatchDistribution& batch, double lambda,
               unsigned jet_order) {
  Point out;
  out.rho = offered_load(p, b, batch, lambda);
  if (!(out.rho < 1)) return out;
  try {
    const auto st = std::make_shared<ServiceTransform>(p, b, lambda, jet_order);
    const auto m = delay_moments(DelayTransforms(st, batch, lambda));
    out.EW = m.EW;
    out.VarW = m.VarW;
    out.ES = m.ES;
    out.VarS = m.VarS;
  } catch (const UnstableError&) {
  }
  return out;
}

CsvRow row(const std::string& case_name, const Scenario& sc, double qbar, double lambda, const Point& pt,
           const char* source) {
  return {case_name, std::string(to_string(sc.behavior.kind())), sc.batch_label, qbar * kHour, lambda * kHour,
          pt.rho, pt.EW, pt.VarW, pt.ES, pt.VarS, source};
}

template <class Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
  const long count = static_cast<long>(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  }
}

unsigned jet_order(const ExperimentSpec& s, const RunOptions& o) { return o.jet_order.value_or(s.jet_order); }

ExperimentResult do_analyze(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentResult res;
  std::ostringstream sum;
  for (const auto& sc : scenarios(spec)) {
    const auto pt = analytic(sc.process, sc.behavior, sc.batch, sc.lambda, jet_order(spec, opt));
    res.rows.push_back(row(sc.case_name, sc, sc.qbar, sc.lambda, pt, "analytic"));
    sum << fmt("%-3s %-10s rho=%.4f  E[W]=%.4f s  Var(W)=%.4f s^2  E[S]=%.4f s  Var(S)=%.4f s^2\n",
               std::string(to_string(sc.behavior.kind())).c_str(), sc.batch_label.c_str(), pt.rho, pt.EW, pt.VarW,
               pt.ES, pt.VarS);
  }
  res.summary = sum.str();
  return res;
}

ExperimentResult do_sweep(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto& sw = *spec.sweep;
  const auto scs = scenarios(spec);
  const std::size_t roads = sw.without_platooning ? 2 : 1;
  const std::size_t per = sw.grid.size();
  std::vector<CsvRow> rows(scs.size() * roads * per);

  for_each_index(rows.size(), opt.parallel, [&](std::size_t idx) {
    const auto& sc = scs[idx / (roads * per)];
    const bool poisson = (idx / per) % roads == 1;
    const double x = sw.grid[idx % per];
    double qbar = sc.qbar, lambda = sc.lambda;
    if (sw.axis == SweepAxis::qbar_vph) qbar = x / kHour;
    else lambda = x / kHour;
    const auto process = poisson ? PhaseProcess::poisson(qbar) : sc.process.with_mean_flow(qbar);
    const auto pt = analytic(process, sc.behavior, sc.batch, lambda, jet_order(spec, opt));
    rows[idx] = row(poisson ? sc.case_name + "/poisson-road" : sc.case_name, sc, qbar, lambda, pt, "analytic");
  });

  std::ostringstream sum;
  for (const auto& sc : scs) {
    const std::string b(to_string(sc.behavior.kind()));
    if (sw.axis == SweepAxis::qbar_vph) {
      sum << fmt("%-3s %-10s stability edge: MMPP road qbar = %.2f veh/h", b.c_str(), sc.batch_label.c_str(),
                 stability_edge_qbar(sc, false) * kHour);
      if (sw.without_platooning)
        sum << fmt(", Poisson road qbar = %.2f veh/h", stability_edge_qbar(sc, true) * kHour);
      sum << "\n";
    } else {
      const double rho_per_lambda = offered_load(sc.process, sc.behavior, sc.batch, sc.lambda) / sc.lambda;
      sum << fmt("%-3s %-10s stability edge: lambda = %.3f batches/h\n", b.c_str(), sc.batch_label.c_str(),
                 kHour / rho_per_lambda);
    }
  }
  std::size_t unstable = 0;
  for (const auto& r : rows) unstable += std::isnan(r.EW);
  if (unstable) sum << unstable << " sweep point(s) unstable (rho >= 1 or at the solver margin); moments left as nan\n";

  ExperimentResult res;
  res.rows = std::move(rows);
  res.summary = sum.str();
  return res;
}

ExperimentResult do_simulate(const ExperimentSpec& spec, const RunOptions& opt) {
  SimulationSpec sim = *spec.simulation;
  if (opt.seed) sim.seed = *opt.seed;
  if (opt.replications) sim.replications = *opt.replications;

  ExperimentResult res;
  std::ostringstream sum, se;
  se << "case,behavior,batch_dist,EW_se,VarW_se,ES_se,VarS_se,replications,measure_s\n";
  for (const auto& sc : scenarios(spec)) {
    SimConfig cfg{sc.process, sc.behavior, sc.lambda, sc.batch, sim.warmup_s, sim.measure_s, sim.replications,
                  sim.seed};
    const auto st = opt.parallel ? run(cfg) : run_serial(cfg);
    const auto pt = analytic(sc.process, sc.behavior, sc.batch, sc.lambda, jet_order(spec, opt));
    Point simulated{pt.rho, st.EW.mean, st.VarW.mean, st.ES.mean, st.VarS.mean};
    res.rows.push_back(row(sc.case_name, sc, sc.qbar, sc.lambda, simulated, "simulated"));
    res.rows.push_back(row(sc.case_name, sc, sc.qbar, sc.lambda, pt, "analytic"));
    se << sc.case_name << ',' << to_string(sc.behavior.kind()) << ',' << sc.batch_label << ',' << num(st.EW.se)
       << ',' << num(st.VarW.se) << ',' << num(st.ES.se) << ',' << num(st.VarS.se) << ',' << st.replications << ','
       << num(sim.measure_s) << '\n';
    auto z = [](double a, const Estimate& e) { return e.se > 0 ? (e.mean - a) / e.se : 0.0; };
    sum << fmt("%-3s %-10s E[W] sim %.3f +- %.3f vs %.3f (z=%+.2f)   Var(W) sim %.1f +- %.1f vs %.1f (z=%+.2f)\n",
               std::string(to_string(sc.behavior.kind())).c_str(), sc.batch_label.c_str(), st.EW.mean, st.EW.se,
               pt.EW, z(pt.EW, st.EW), st.VarW.mean, st.VarW.se, pt.VarW, z(pt.VarW, st.VarW));
  }
  const auto se_path = opt.out_dir / "simulate_se.csv";
  std::ofstream(se_path) << se.str();
  res.files.push_back(se_path);
  res.summary = sum.str();
  return res;
}

ExperimentResult do_approx(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto& ap = *spec.approx;
  const auto scs = scenarios(spec);
  const std::size_t per = ap.rho_grid.size();
  std::vector<CsvRow> rows(2 * scs.size() * per);
  std::vector<double> rho_per_lambda(scs.size());
  for (std::size_t i = 0; i < scs.size(); ++i)
    rho_per_lambda[i] = offered_load(scs[i].process, scs[i].behavior, scs[i].batch, scs[i].lambda) / scs[i].lambda;

  for_each_index(scs.size() * per, opt.parallel, [&](std::size_t idx) {
    const std::size_t s = idx / per;
    const auto& sc = scs[s];
    const double rho = ap.rho_grid[idx % per], lambda = rho / rho_per_lambda[s];
    const auto exact = analytic(sc.process, sc.behavior, sc.batch, lambda, jet_order(spec, opt));
    const ServiceTransform st(sc.process, sc.behavior, lambda, 2);
    const ApproxParams params{ap.delta, ap.eta, rho};
    const Point approx{rho, wait_approx(params, lambda, sc.batch, st), kNaN,
                       sojourn_approx(params, lambda, sc.batch), kNaN};
    rows[2 * idx] = row(sc.case_name, sc, sc.qbar, lambda, exact, "analytic");
    rows[2 * idx + 1] = row(sc.case_name, sc, sc.qbar, lambda, approx, "approx");
  });

  std::ostringstream sum;
  for (std::size_t i = 0; i < scs.size(); ++i)
    sum << fmt("%-3s %-10s rho/lambda = %.4f (lambda in batches/s); delta(batch) = %.4f\n",
               std::string(to_string(scs[i].behavior.kind())).c_str(), scs[i].batch_label.c_str(),
               rho_per_lambda[i], lt_limit_delta(scs[i].batch));
  for (std::size_t i = 0; i < rows.size(); i += 2)
    sum << fmt("  rho=%.3f  E[S] exact %.4f  approx %.4f  (%+.2f%%)\n", rows[i].rho, rows[i].ES, rows[i + 1].ES,
               100 * (rows[i + 1].ES / rows[i].ES - 1));

  ExperimentResult res;
  res.rows = std::move(rows);
  res.summary = sum.str();
  return res;
}

ExperimentResult do_table1(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto scs = scenarios(spec);
  const auto& qs = spec.table1_qbar_vph;
  std::vector<CsvRow> rows(scs.size() * qs.size());
  for_each_index(rows.size(), opt.parallel, [&](std::size_t idx) {
    const auto& sc = scs[idx / qs.size()];
    const double qbar = qs[idx % qs.size()] / kHour;
    const auto pt = analytic(sc.process.with_mean_flow(qbar), sc.behavior, sc.batch, sc.lambda, jet_order(spec, opt));
    rows[idx] = row(sc.case_name, sc, qbar, sc.lambda, pt, "analytic");
  });

  std::ostringstream sum;
  sum << fmt("%-12s %-3s", "batch", "");
  for (double q : qs) sum << fmt(" | qbar=%-6g %9s %11s", q, "E[W]", "Var(W)");
  sum << "\n";
  for (std::size_t s = 0; s < scs.size(); ++s) {
    sum << fmt("%-12s %-3s", scs[s].batch_label.c_str(), std::string(to_string(scs[s].behavior.kind())).c_str());
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto& r = rows[s * qs.size() + k];
      sum << fmt(" | %11s %9.2f %11.2f", "", r.EW, r.VarW);
    }
    sum << "\n";
  }
  ExperimentResult res;
  res.rows = std::move(rows);
  res.summary = sum.str();
  return res;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.case_name << ',' << r.behavior << ',' << r.batch_dist << ',' << num(r.qbar_vph) << ','
       << num(r.lambda_bph) << ',' << num(r.rho) << ',' << num(r.EW) << ',' << num(r.VarW) << ',' << num(r.ES) << ','
       << num(r.VarS) << ',' << r.source << '\n';
}

double stability_edge_qbar(const Scenario& sc, bool poisson_road, double hi) {
  auto rho = [&](double q) {
    const auto p = poisson_road ? PhaseProcess::poisson(q) : sc.process.with_mean_flow(q);
    return offered_load(p, sc.behavior, sc.batch, sc.lambda);
  };
  double lo = 0.0;
  if (rho(hi) < 1) return std::numeric_limits<double>::infinity();
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (mid > 0 && rho(mid) < 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::model: return 3;
    case ErrorCategory::unstable: return 4;
    case ErrorCategory::numerical: return 5;
  }
  return 1;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  ExperimentResult res;
  switch (spec.kind) {
    case ExperimentKind::analyze: res = do_analyze(spec, opt); break;
    case ExperimentKind::sweep: res = do_sweep(spec, opt); break;
    case ExperimentKind::simulate: res = do_simulate(spec, opt); break;
    case ExperimentKind::approx: res = do_approx(spec, opt); break;
    case ExperimentKind::table1: res = do_table1(spec, opt); break;
  }
  const std::string kind(to_string(spec.kind));
  const auto csv = opt.out_dir / (kind + ".csv");
  {
    std::ofstream os(csv);
    write_csv(os, res.rows);
    if (!os) throw ConfigError(csv.string() + ": cannot write output");
  }
  const auto summary = opt.out_dir / (kind + "_summary.txt");
  std::ofstream(summary) << res.summary;
  res.files.insert(res.files.begin(), {csv, summary});
  return res;
}

}  // namespace gapq::cli
