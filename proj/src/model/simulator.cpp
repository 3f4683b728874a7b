#include "gapq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gapq/error.hpp"

namespace gapq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Draws are built from raw 64-bit outputs so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  template <class It, class Weight>
  It pick(It first, It last, Weight weight) {
    double u = uniform();
    for (It it = first; it != last; ++it) {
      u -= weight(*it);
      if (u < 0) return it;
    }
    return std::prev(last);
  }

 private:
  std::mt19937_64 eng_;
};

// Major-road MMPP generated lazily in time order.
class MajorRoad {
 public:
  MajorRoad(const PhaseProcess& p, Rng& rng) : p_(p), rng_(rng) {
    const auto pi = stationary_phase(p);
    std::size_t i = 0;
    double u = rng_.uniform();
    while (i + 1 < pi.size() && (u -= pi[i]) >= 0) ++i;
    phase_ = i;
    advance();
  }

  double peek() const { return next_; }

  double pop() {
    const double a = next_;
    advance();
    return a;
  }

 private:
  void advance() {
    const auto& Q = p_.generator();
    const auto& q = p_.rates();
    for (;;) {
      const double leave = -Q(phase_, phase_);
      const double total = leave + q[phase_];
      if (total <= 0) {
        next_ = clock_ = INFINITY;
        return;
      }
      clock_ += rng_.exponential(total);
      if (rng_.uniform() * total < q[phase_]) {
        next_ = clock_;
        return;
      }
      double u = rng_.uniform() * leave;
      std::size_t j = phase_;
      for (std::size_t k = 0; k < p_.phases(); ++k) {
        if (k == phase_ || Q(phase_, k) <= 0) continue;
        j = k;
        if ((u -= Q(phase_, k)) < 0) break;
      }
      phase_ = j;
    }
  }

  const PhaseProcess& p_;
  Rng& rng_;
  std::size_t phase_ = 0;
  double clock_ = 0;
  double next_ = 0;
};

struct Customer {
  double arrival;
  std::uint32_t batch;  // batch sequence number
  bool last_of_batch;
};

double sample_gap(const BehaviorModel& b, Rng& rng) {
  const auto& g = b.gaps();
  if (g.size() == 1) return g.front().T;
  return rng.pick(g.begin(), g.end(), [](const Gap& x) { return x.p; })->T;
}

struct Moments {
  double n = 0, sum = 0, sumsq = 0;
  void add(double x) {
    n += 1;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double variance() const { return n > 1 ? (sumsq - sum * sum / n) / (n - 1) : 0.0; }
};

Estimate across(const std::vector<ReplicationRecord>& recs, double ReplicationRecord::* field) {
  Moments m;
  for (const auto& r : recs) m.add(r.*field);
  return {m.mean(), recs.size() > 1 ? std::sqrt(m.variance() / m.n) : 0.0};
}

Estimate across(const std::vector<ReplicationRecord>& recs, auto getter) {
  Moments m;
  for (const auto& r : recs) m.add(getter(r));
  return {m.mean(), recs.size() > 1 ? std::sqrt(m.variance() / m.n) : 0.0};
}

SimStats aggregate(std::vector<ReplicationRecord> recs) {
  SimStats s;
  s.replications = static_cast<unsigned>(recs.size());
  s.EW = across(recs, &ReplicationRecord::EW);
  s.VarW = across(recs, &ReplicationRecord::VarW);
  s.ES = across(recs, &ReplicationRecord::ES);
  s.VarS = across(recs, &ReplicationRecord::VarS);
  s.EW_cross = across(recs, &ReplicationRecord::EW_cross);
  s.queue_at_departure = across(recs, &ReplicationRecord::queue_at_departure);
  s.major_rate = across(recs, &ReplicationRecord::major_rate);
  s.time_avg_in_system = across(recs, &ReplicationRecord::time_avg_in_system);
  s.throughput = across(recs, &ReplicationRecord::throughput);
  s.records = std::move(recs);
  return s;
}

}  // namespace

void SimConfig::validate() const {
  if (!(lambda > 0)) throw ModelError("simulator: lambda must be > 0");
  if (!(warmup_s > 0)) throw ModelError("simulator: warmup_s must be > 0");
  if (!(measure_s > 0)) throw ModelError("simulator: measure_s must be > 0");
  if (replications < 1) throw ModelError("simulator: replications must be >= 1");
  const ServiceTransform st(process, behavior, lambda, 2);
  const double rho = lambda * batch.mean() * service_moments(st).mean;
  if (!(rho < 1)) throw UnstableError("simulator: offered load rho = " + std::to_string(rho) + " >= 1", rho);
}

ReplicationRecord simulate_replication(const SimConfig& cfg, unsigned index) {
  Rng rng(splitmix64(cfg.seed ^ splitmix64(index)));
  MajorRoad road(cfg.process, rng);
  const double t0 = cfg.warmup_s, t1 = cfg.warmup_s + cfg.measure_s;
  const auto& pmf = cfg.batch.pmf();
  const bool fixed_gap_per_driver = cfg.behavior.kind() != Behavior::B2;

  // Minor-road arrivals cover the window plus enough slack to drain it.
  std::vector<Customer> arrivals;
  {
    double t = 0;
    std::uint32_t b = 0;
    while ((t += rng.exponential(cfg.lambda)) < t1) {
      const unsigned k = rng.pick(pmf.begin(), pmf.end(), [](const BatchMass& m) { return m.p; })->k;
      for (unsigned j = 0; j < k; ++j) arrivals.push_back({t, b, j + 1 == k});
      ++b;
    }
  }

  ReplicationRecord rec;
  Moments W, S, Wc, X, X0, Xb, Xb0;
  std::vector<Moments> pgf(cfg.pgf_points.size()), batch_pgf(cfg.pgf_points.size());
  std::vector<double> departures;
  departures.reserve(arrivals.size());

  double free_at = 0;       // end of the previous crossing
  std::uint64_t major_in_window = 0;
  std::size_t next_arrival = 0;  // first customer not yet arrived at a departure instant
  std::uint32_t batches_done = 0;

  auto count_major_until = [&](double t) {
    while (road.peek() <= t) {
      const double a = road.pop();
      if (a >= t0 && a < t1) ++major_in_window;
    }
  };

  for (std::size_t c = 0; c < arrivals.size(); ++c) {
    const double start = std::max(arrivals[c].arrival, free_at);
    count_major_until(start);
    double t = start;
    double T = sample_gap(cfg.behavior, rng);
    for (;;) {
      const double a = road.peek();
      if (a - t >= T) break;
      t = road.pop();
      if (t >= t0 && t < t1) ++major_in_window;
      if (!fixed_gap_per_driver) T = sample_gap(cfg.behavior, rng);
    }
    const double dep = t + T;
    free_at = dep;
    departures.push_back(dep);

    const double arr = arrivals[c].arrival;
    if (arr >= t0) {
      W.add(start - arr);
      Wc.add(t - arr);
      S.add(dep - arr);
    }

    while (next_arrival < arrivals.size() && arrivals[next_arrival].arrival <= dep) ++next_arrival;
    if (dep >= t0 && dep < t1) {
      const double left = static_cast<double>(next_arrival - c - 1);
      X.add(left);
      X0.add(left == 0 ? 1.0 : 0.0);
      for (std::size_t i = 0; i < pgf.size(); ++i) pgf[i].add(std::pow(cfg.pgf_points[i], left));
    }
    if (arrivals[c].last_of_batch) {
      ++batches_done;
      if (dep >= t0 && dep < t1) {
        const std::uint32_t arrived =
            next_arrival == 0 ? 0 : arrivals[next_arrival - 1].batch + 1;
        const double left = static_cast<double>(arrived - batches_done);
        Xb.add(left);
        Xb0.add(left == 0 ? 1.0 : 0.0);
        for (std::size_t i = 0; i < batch_pgf.size(); ++i) batch_pgf[i].add(std::pow(cfg.pgf_points[i], left));
      }
    }
  }
  count_major_until(t1);

  // Time-average number in system over [t0, t1): integrate N(t) from the sorted
  // arrival and departure epochs (FIFO keeps departures sorted).
  {
    double area = 0;
    long n = 0;
    double last = t0;
    std::size_t i = 0, j = 0;
    for (; i < arrivals.size() && arrivals[i].arrival < t0; ++i) ++n;
    for (; j < departures.size() && departures[j] < t0; ++j) --n;
    while (true) {
      const double ta = i < arrivals.size() ? arrivals[i].arrival : INFINITY;
      const double td = j < departures.size() ? departures[j] : INFINITY;
      const double t = std::min({ta, td, t1});
      area += n * (t - last);
      last = t;
      if (t >= t1) break;
      if (ta <= td) { ++n; ++i; } else { --n; ++j; }
    }
    rec.time_avg_in_system = area / cfg.measure_s;
  }

  rec.EW = W.mean();
  rec.VarW = W.variance();
  rec.ES = S.mean();
  rec.VarS = S.variance();
  rec.EW_cross = Wc.mean();
  rec.queue_at_departure = X.mean();
  rec.empty_at_departure = X0.mean();
  rec.batch_queue_at_departure = Xb.mean();
  rec.batch_empty_at_departure = Xb0.mean();
  for (auto& m : pgf) rec.pgf.push_back(m.mean());
  for (auto& m : batch_pgf) rec.batch_pgf.push_back(m.mean());
  rec.major_rate = static_cast<double>(major_in_window) / cfg.measure_s;
  rec.throughput = W.n / cfg.measure_s;
  rec.customers = static_cast<std::uint64_t>(W.n);
  return rec;
}

SimStats run_serial(const SimConfig& cfg) {
  cfg.validate();
  std::vector<ReplicationRecord> recs(cfg.replications);
  for (unsigned r = 0; r < cfg.replications; ++r) recs[r] = simulate_replication(cfg, r);
  return aggregate(std::move(recs));
}

SimStats run(const SimConfig& cfg) {
  cfg.validate();
  std::vector<ReplicationRecord> recs(cfg.replications);
  const int n = static_cast<int>(cfg.replications);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < n; ++r) recs[r] = simulate_replication(cfg, static_cast<unsigned>(r));
  return aggregate(std::move(recs));
}

ProbeStats run_embedded_probe(const SimConfig& cfg) {
  const auto stats = run(cfg);
  const auto& recs = stats.records;
  ProbeStats p;
  p.points = cfg.pgf_points;
  p.empty = across(recs, &ReplicationRecord::empty_at_departure);
  p.mean = across(recs, &ReplicationRecord::queue_at_departure);
  p.batch_empty = across(recs, &ReplicationRecord::batch_empty_at_departure);
  p.batch_mean = across(recs, &ReplicationRecord::batch_queue_at_departure);
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    p.pgf.push_back(across(recs, [i](const ReplicationRecord& r) { return r.pgf[i]; }));
    p.batch_pgf.push_back(across(recs, [i](const ReplicationRecord& r) { return r.batch_pgf[i]; }));
  }
  return p;
}

}  // namespace gapq
