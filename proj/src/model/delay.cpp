#include "gapq/delay.hpp"

#include <numeric>

namespace gapq {

SuperServiceTransform::SuperServiceTransform(std::shared_ptr<const ServiceKernel> base, BatchDistribution batch)
    : base_(std::move(base)), batch_(std::move(batch)) {
  if (!base_) throw ModelError("missing base service kernel");
}

template <class T>
KernelValue<T> SuperServiceTransform::evaluate(const Jet<T>& s) const {
  const KernelValue<T> kv = base_->at(s);
  const std::size_t n = phases();
  const Jet<T> zero(T{}, s.order());
  JetMatrix<T> power = JetMatrix<T>::identity(n, Jet<T>(T{1}, s.order()));  // G^(k-1)
  JetMatrix<T> tail_sum(n, n, zero);                                        // sum b_k G^(k-1)
  unsigned k = 1;
  for (const auto& m : batch_.pmf()) {
    for (; k < m.k; ++k) power = power * kv.regular;
    tail_sum += scaled(power, Jet<T>(T{m.p}, s.order()));
  }
  return {kv.regular * tail_sum, kv.exceptional * tail_sum};
}

KernelValue<double> SuperServiceTransform::at(const Jet<double>& s) const { return evaluate(s); }
KernelValue<cplx> SuperServiceTransform::at(const Jet<cplx>& s) const { return evaluate(s); }

KernelValue<double> super_service(std::shared_ptr<const ServiceKernel> st, const BatchDistribution& batch,
                                  const Jet<double>& s) {
  return SuperServiceTransform(std::move(st), batch).at(s);
}

QueueSolution super_chain(std::shared_ptr<const SuperServiceTransform> ss, double lambda, const NumericPolicy& policy) {
  return solve_queue(build_system(std::move(ss), lambda, BatchDistribution::single()), policy);
}

BeginServiceSplit begin_service_split(const QueueSolution& qs, const Jet<double>& z) {
  const auto& f0 = qs.boundary();
  BeginServiceSplit out;
  if (z.value() == 0.0) {
    // (f(z) - f(0)) / z at z = 0: shift the expansion at the origin
    const auto series = qs.evaluate(Jet<double>::variable(0.0, z.order() + 1));
    for (std::size_t i = 0; i < f0.size(); ++i) {
      out.empty.emplace_back(f0[i], z.order());
      out.nonempty.push_back(compose(series[i].shifted_down(), z));
    }
    return out;
  }
  const auto f = qs.evaluate(z);
  for (std::size_t i = 0; i < f0.size(); ++i) {
    out.empty.emplace_back(f0[i], z.order());
    out.nonempty.push_back((f[i] - f0[i]) / z);
  }
  return out;
}

Jet<double> LittleTransforms::wait() const {
  Jet<double> acc(0.0, wait_empty.front().order());
  for (std::size_t i = 0; i < wait_empty.size(); ++i) acc = acc + wait_empty[i] + wait_nonempty[i];
  return acc;
}

Jet<double> LittleTransforms::sojourn_total() const {
  Jet<double> acc(0.0, sojourn.front().order());
  for (const auto& x : sojourn) acc = acc + x;
  return acc;
}

LittleTransforms little_transforms(const QueueSolution& qs, double lambda, const Jet<double>& s) {
  const Jet<double> z = 1.0 - s / lambda;
  auto split = begin_service_split(qs, z);
  return {std::move(split.empty), std::move(split.nonempty), qs.evaluate(z)};
}

std::vector<double> position_probabilities(const BatchDistribution& batch) {
  std::vector<double> r;
  const double mean = batch.mean();
  for (unsigned m = 1; m <= batch.max_size(); ++m) r.push_back(batch.tail(m) / mean);
  return r;
}

DelayTransforms::DelayTransforms(std::shared_ptr<const ServiceKernel> customer, BatchDistribution batch, double lambda,
                                 const NumericPolicy& policy)
    : customer_(customer),
      batch_(batch),
      lambda_(lambda),
      super_(super_chain(std::make_shared<SuperServiceTransform>(std::move(customer), std::move(batch)), lambda,
                         policy)) {}

std::vector<Jet<double>> DelayTransforms::position_waits(unsigned count, const Jet<double>& s) const {
  const auto lt = little(s);
  const auto kv = customer_->at(s);
  std::vector<Jet<double>> out{lt.wait()};
  if (count <= 1) return out;
  // row vectors: empty part after the exceptional first service, non-empty part after one regular service
  auto empty = row_times(lt.wait_empty, kv.exceptional);
  auto busy = row_times(lt.wait_nonempty, kv.regular);
  for (unsigned m = 2; m <= count; ++m) {
    Jet<double> w(0.0, s.order());
    for (std::size_t i = 0; i < empty.size(); ++i) w = w + empty[i] + busy[i];
    out.push_back(w);
    if (m < count) {
      empty = row_times(empty, kv.regular);
      busy = row_times(busy, kv.regular);
    }
  }
  return out;
}

Jet<double> position_wait_lst(const DelayTransforms& dt, unsigned m, const Jet<double>& s) {
  if (m < 1 || m > dt.batch().max_size() + 1) throw ModelError("position m must lie in 1..max batch size + 1");
  return dt.position_waits(m, s).back();
}

Jet<double> position_sojourn_lst(const DelayTransforms& dt, unsigned m, const Jet<double>& s) {
  if (m < 1 || m > dt.batch().max_size()) throw ModelError("position m must lie in 1..max batch size");
  return dt.position_waits(m + 1, s).back();
}

DelayLst arbitrary_delay(const DelayTransforms& dt, const Jet<double>& s) {
  const auto r = position_probabilities(dt.batch());
  const auto w = dt.position_waits(static_cast<unsigned>(r.size()) + 1, s);
  DelayLst out{Jet<double>(0.0, s.order()), Jet<double>(0.0, s.order())};
  for (std::size_t m = 0; m < r.size(); ++m) {
    out.wait = out.wait + w[m] * r[m];
    out.sojourn = out.sojourn + w[m + 1] * r[m];
  }
  return out;
}

DelayMoments delay_moments(const DelayTransforms& dt) {
  const auto d = arbitrary_delay(dt, Jet<double>::variable(0.0, 2));
  // E[X] = -c1, E[X^2] = 2 c2
  return {-d.wait[1], 2 * d.wait[2] - d.wait[1] * d.wait[1], -d.sojourn[1], 2 * d.sojourn[2] - d.sojourn[1] * d.sojourn[1]};
}

}  // namespace gapq
