#pragma once

#include <cstdint>
#include <vector>

#include "gapq/gap_service.hpp"
#include "gapq/queue_core.hpp"

namespace gapq {

/// Discrete-event model of the intersection. Times in seconds, rates per second.
struct SimConfig {
  PhaseProcess process;
  BehaviorModel behavior;
  double lambda;  // batches per second
  BatchDistribution batch;
  double warmup_s;
  double measure_s;
  unsigned replications = 20;
  std::uint64_t seed = 1;
  /// Points at which the empirical departure-epoch PGFs are sampled.
  std::vector<double> pgf_points{0.0, 0.25, 0.5, 0.75};

  void validate() const;
};

/// Point estimate across replications and its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Everything one replication measures over its window.
struct ReplicationRecord {
  double EW = 0, VarW = 0, ES = 0, VarS = 0;
  double EW_cross = 0;     // wait until the start of the own crossing
  double queue_at_departure = 0;
  double empty_at_departure = 0;
  double batch_queue_at_departure = 0;
  double batch_empty_at_departure = 0;
  std::vector<double> pgf, batch_pgf;
  double major_rate = 0;   // major-road vehicles per second
  double time_avg_in_system = 0;
  double throughput = 0;   // customers per second arriving in the window
  std::uint64_t customers = 0;
};

struct SimStats {
  Estimate EW, VarW, ES, VarS, EW_cross;
  Estimate queue_at_departure, major_rate, time_avg_in_system, throughput;
  unsigned replications = 0;
  std::vector<ReplicationRecord> records;
};

/// Empirical (super-)customer departure-epoch chains.
struct ProbeStats {
  Estimate empty, mean, batch_empty, batch_mean;
  std::vector<double> points;
  std::vector<Estimate> pgf, batch_pgf;
};

/// Replications run in parallel with OpenMP; results are identical to run_serial.
SimStats run(const SimConfig& cfg);
SimStats run_serial(const SimConfig& cfg);
ProbeStats run_embedded_probe(const SimConfig& cfg);

/// One replication. Stream `index` is seeded from cfg.seed with SplitMix64.
ReplicationRecord simulate_replication(const SimConfig& cfg, unsigned index);

}  // namespace gapq
