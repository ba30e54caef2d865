#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ucmab/core.hpp"

namespace ucmab {

struct ScoredIndividual {
  double score = 0.0;  // predicted uplift, used only for ranking
  Treatment arm = Treatment::control;
  Outcome y;
};

/// Cumulative incremental response rate over the first `bin` bins:
///   q = responders_treated / n_treated - responders_control / n_control.
struct QiniPoint {
  std::size_t bin = 0;  // 1..B
  double fraction = 0.0;
  double q = 0.0;
  std::size_t responders_treated = 0;
  std::size_t n_treated = 0;
  std::size_t responders_control = 0;
  std::size_t n_control = 0;
  /// Set when an arm is absent from the included bins; q is then 0.
  bool undefined = false;
};

/// Ranks by descending score (stable, so equal scores keep input order),
/// splits into B near-equal bins (the first N mod B bins get one extra row)
/// and accumulates. Throws DomainError on empty input, B < 1, B > N, a
/// non-finite score or input lacking one of the arms.
std::vector<QiniPoint> qini_curve(std::span<const ScoredIndividual> scored, std::size_t bins);

/// Expected curve of a random ranking: final_q * b / B for b = 1..B.
std::vector<double> random_selection_line(double final_q, std::size_t bins);

/// Trapezoidal area between curve and baseline over fraction in [0, 1],
/// both anchored at 0 for fraction 0. Throws DomainError on length mismatch.
double qini_area(std::span<const double> curve, std::span<const double> baseline);

/// q values of a curve, in bin order.
std::vector<double> q_values(std::span<const QiniPoint> curve);

/// Windowed causal-regret sequence of one episode or an aggregate.
struct RegretTrace {
  std::vector<double> values;  // moving average over the trailing `window` steps
  std::size_t window = 1;
  std::vector<std::uint64_t> drift_markers;
};

/// Trailing moving average; step t averages steps max(0, t - window + 1)..t.
RegretTrace windowed_regret(std::span<const double> per_step, std::size_t window,
                            std::vector<std::uint64_t> drift_markers = {});

struct AggregatedTrace {
  RegretTrace mean;
  std::vector<double> min;
  std::vector<double> max;
};

/// Pointwise mean with a min/max band. Throws DomainError when lengths or
/// windows differ or the input is empty.
AggregatedTrace aggregate_traces(std::span<const RegretTrace> traces);

/// CSV writers (UTF-8, comma separated, header row). Reals use the shortest
/// round-trip representation so output is byte-stable.
void write_trace_csv(std::ostream& out, const RegretTrace& trace);
void write_aggregate_csv(std::ostream& out, const AggregatedTrace& trace);
void write_qini_csv(std::ostream& out, std::span<const QiniPoint> curve, std::span<const double> random_line);

std::string format_real(double v);

}  // namespace ucmab
