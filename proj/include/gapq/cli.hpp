#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapq/gap_service.hpp"
#include "gapq/queue_core.hpp"
#include "gapq/simulator.hpp"

namespace gapq::cli {

// Config-level records keep the user's units (veh/h, batches/h, seconds) so
// that emit(parse(x)) is exact; model objects are built on demand in SI units.

struct PhaseSpec {
  std::vector<std::vector<double>> generator_per_s;
  std::vector<double> rates_vph;
  std::optional<double> mean_flow_vph;  // rescales rates_vph to this mean flow
  bool operator==(const PhaseSpec&) const = default;
};

struct BehaviorSpec {
  Behavior kind = Behavior::B1;
  std::vector<Gap> gaps;
  bool operator==(const BehaviorSpec& o) const;
};

struct BatchSpec {
  std::string label;
  std::optional<std::pair<unsigned, unsigned>> uniform_range;
  std::vector<BatchMass> pmf;           // used when uniform_range is empty
  std::optional<double> lambda_bph;     // overrides the model's lambda
  bool operator==(const BatchSpec& o) const;
};

struct ModelSpec {
  PhaseSpec phase;
  BehaviorSpec behavior;
  BatchSpec batch;
  double lambda_bph = 0;
  bool operator==(const ModelSpec&) const = default;
};

enum class ExperimentKind { analyze, sweep, simulate, approx, table1 };
std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_from_string(std::string_view s);

enum class SweepAxis { qbar_vph, lambda_bph };

struct SweepSpec {
  SweepAxis axis = SweepAxis::qbar_vph;
  std::vector<double> grid;
  bool without_platooning = false;  // add Poisson-road curves with q = qbar
  bool operator==(const SweepSpec&) const = default;
};

struct SimulationSpec {
  double warmup_s = 0;
  double measure_s = 0;
  unsigned replications = 20;
  std::uint64_t seed = 1;
  bool operator==(const SimulationSpec&) const = default;
};

struct ApproxSpec {
  double delta = 0;
  double eta = 0;
  std::vector<double> rho_grid;
  bool operator==(const ApproxSpec&) const = default;
};

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::analyze;
  ModelSpec model;
  // Optional cross products; an empty list means "the model's own value".
  std::vector<BehaviorSpec> behaviors;
  std::vector<BatchSpec> batches;
  std::optional<SweepSpec> sweep;
  std::optional<SimulationSpec> simulation;
  std::optional<ApproxSpec> approx;
  std::vector<double> table1_qbar_vph;
  unsigned jet_order = 12;
  bool operator==(const ExperimentSpec&) const = default;
};

/// A concrete model in SI units.
struct Scenario {
  std::string case_name;
  std::string batch_label;
  PhaseProcess process;
  BehaviorModel behavior;
  BatchDistribution batch;
  double lambda;  // batches per second
  double qbar;    // veh per second
};

PhaseProcess build_process(const PhaseSpec& s);
BehaviorModel build_behavior(const BehaviorSpec& s);
BatchDistribution build_batch(const BatchSpec& s);

/// Behavior x batch variants of the base model, in config order.
std::vector<Scenario> scenarios(const ExperimentSpec& spec);

ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config(const std::filesystem::path& path);
std::string emit_config(const ExperimentSpec& spec);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> replications;
  std::optional<unsigned> jet_order;
  bool parallel = true;
};

struct CsvRow {
  std::string case_name, behavior, batch_dist;
  double qbar_vph, lambda_bph, rho, EW, VarW, ES, VarS;
  std::string source;  // analytic | simulated | approx
};

inline constexpr const char* kCsvHeader =
    "case,behavior,batch_dist,qbar_vph,lambda_bph,rho,EW_s,VarW_s2,ES_s,VarS_s2,source";

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

struct ExperimentResult {
  std::vector<CsvRow> rows;
  std::string summary;
  std::vector<std::filesystem::path> files;
};

/// Runs the experiment, writes `<kind>.csv` (plus extras) into out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

/// Process exit code for an error category; 0 is success, 1 an unexpected failure.
int exit_code(ErrorCategory c);

/// Smallest q̄ (veh/s) at which the scenario's offered load reaches 1, by bisection.
double stability_edge_qbar(const Scenario& sc, bool poisson_road, double hi = 5000.0 / 3600.0);

}  // namespace gapq::cli
