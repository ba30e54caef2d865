#include "ucmab/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "ucmab/errors.hpp"

namespace ucmab {

std::vector<QiniPoint> qini_curve(std::span<const ScoredIndividual> scored, std::size_t bins) {
  if (scored.empty()) throw DomainError("qini curve needs at least one individual");
  if (bins < 1) throw DomainError("qini curve needs at least one bin");
  if (bins > scored.size()) throw DomainError("more bins than individuals");
  bool has_treated = false;
  bool has_control = false;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) throw DomainError("scores must be finite");
    (s.arm == Treatment::treated ? has_treated : has_control) = true;
  }
  if (!has_treated || !has_control) throw DomainError("qini curve needs both arms");

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });

  const std::size_t n = scored.size();
  const std::size_t base = n / bins;
  const std::size_t extra = n % bins;
  std::vector<QiniPoint> curve;
  curve.reserve(bins);
  QiniPoint acc;
  std::size_t next = 0;
  for (std::size_t b = 1; b <= bins; ++b) {
    const std::size_t size = base + (b <= extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k, ++next) {
      const auto& s = scored[order[next]];
      if (s.arm == Treatment::treated) {
        ++acc.n_treated;
        if (s.y.responded) ++acc.responders_treated;
      } else {
        ++acc.n_control;
        if (s.y.responded) ++acc.responders_control;
      }
    }
    acc.bin = b;
    acc.fraction = static_cast<double>(b) / static_cast<double>(bins);
    acc.undefined = acc.n_treated == 0 || acc.n_control == 0;
    acc.q = acc.undefined ? 0.0
                          : static_cast<double>(acc.responders_treated) / static_cast<double>(acc.n_treated) -
                                static_cast<double>(acc.responders_control) / static_cast<double>(acc.n_control);
    curve.push_back(acc);
  }
  return curve;
}

std::vector<double> random_selection_line(double final_q, std::size_t bins) {
  if (bins < 1) throw DomainError("random selection line needs at least one bin");
  std::vector<double> line(bins);
  for (std::size_t b = 1; b <= bins; ++b) line[b - 1] = final_q * static_cast<double>(b) / static_cast<double>(bins);
  return line;
}

double qini_area(std::span<const double> curve, std::span<const double> baseline) {
  if (curve.size() != baseline.size()) throw DomainError("curve and baseline lengths differ");
  if (curve.empty()) throw DomainError("empty curve");
  const double width = 1.0 / static_cast<double>(curve.size());
  double area = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double gap = curve[i] - baseline[i];
    area += (previous + gap) / 2.0 * width;
    previous = gap;
  }
  return area;
}

std::vector<double> q_values(std::span<const QiniPoint> curve) {
  std::vector<double> q(curve.size());
  std::transform(curve.begin(), curve.end(), q.begin(), [](const QiniPoint& p) { return p.q; });
  return q;
}

RegretTrace windowed_regret(std::span<const double> per_step, std::size_t window,
                            std::vector<std::uint64_t> drift_markers) {
  if (window < 1) throw DomainError("window must be >= 1");
  RegretTrace trace;
  trace.window = window;
  trace.drift_markers = std::move(drift_markers);
  trace.values.resize(per_step.size());
  // Integer running sum keeps the average exact for 0/1 regrets.
  double sum = 0.0;
  for (std::size_t t = 0; t < per_step.size(); ++t) {
    sum += per_step[t];
    if (t >= window) sum -= per_step[t - window];
    trace.values[t] = sum / static_cast<double>(std::min(t + 1, window));
  }
  return trace;
}

AggregatedTrace aggregate_traces(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw DomainError("no traces to aggregate");
  const auto& first = traces.front();
  for (const auto& t : traces) {
    if (t.values.size() != first.values.size()) throw DomainError("traces differ in length");
    if (t.window != first.window) throw DomainError("traces differ in window");
  }
  AggregatedTrace out;
  out.mean.window = first.window;
  out.mean.drift_markers = first.drift_markers;
  const std::size_t len = first.values.size();
  out.mean.values.assign(len, 0.0);
  out.min = first.values;
  out.max = first.values;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < len; ++i) {
      out.mean.values[i] += t.values[i];
      out.min[i] = std::min(out.min[i], t.values[i]);
      out.max[i] = std::max(out.max[i], t.values[i]);
    }
  }
  const double k = static_cast<double>(traces.size());
  for (double& v : out.mean.values) v /= k;
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

namespace {
std::set<std::uint64_t> marker_set(const RegretTrace& trace) {
  return {trace.drift_markers.begin(), trace.drift_markers.end()};
}
}  // namespace

void write_trace_csv(std::ostream& out, const RegretTrace& trace) {
  const auto markers = marker_set(trace);
  out << "step,regret_windowed,drift_marker\n";
  for (std::size_t t = 0; t < trace.values.size(); ++t)
    out << t << ',' << format_real(trace.values[t]) << ',' << (markers.count(t) ? 1 : 0) << '\n';
}

void write_aggregate_csv(std::ostream& out, const AggregatedTrace& trace) {
  const auto markers = marker_set(trace.mean);
  out << "step,regret_windowed,regret_min,regret_max,drift_marker\n";
  for (std::size_t t = 0; t < trace.mean.values.size(); ++t) {
    out << t << ',' << format_real(trace.mean.values[t]) << ',' << format_real(trace.min[t]) << ','
        << format_real(trace.max[t]) << ',' << (markers.count(t) ? 1 : 0) << '\n';
  }
}

void write_qini_csv(std::ostream& out, std::span<const QiniPoint> curve, std::span<const double> random_line) {
  if (curve.size() != random_line.size()) throw DomainError("curve and random line lengths differ");
  out << "bin,fraction,q,random_q,responders_treated,n_treated,responders_control,n_control,undefined\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    out << p.bin << ',' << format_real(p.fraction) << ',' << format_real(p.q) << ',' << format_real(random_line[i])
        << ',' << p.responders_treated << ',' << p.n_treated << ',' << p.responders_control << ',' << p.n_control
        << ',' << (p.undefined ? 1 : 0) << '\n';
  }
}

}  // namespace ucmab
