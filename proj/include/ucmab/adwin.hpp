#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

namespace ucmab {

/// Adaptive-windowing change detector over values in [0, 1].
///
/// The window is stored as an exponential histogram: level i holds up to
/// `max_buckets` buckets of 2^i values each, newest first. Every `clock`
/// insertions, each bucket boundary is tried as a split into an older
/// sub-window W0 and a newer W1; a split whose means differ by more than
///
///   eps = sqrt(2 m v d) + 2/3 d m,
///   d = ln(2 ln(|W|) / delta),  m = 1/(n0 - k + 1) + 1/(n1 - k + 1)
///
/// (v the window variance, k the minimum sub-window length) signals a
/// change, and the oldest buckets are dropped until no split qualifies.
class AdwinDetector {
 public:
  struct Params {
    double delta = 0.002;
    std::size_t max_buckets = 5;
    std::size_t clock = 32;
    std::size_t min_subwindow = 5;
  };

  AdwinDetector();
  explicit AdwinDetector(Params params);

  /// Inserts a value; returns true if a change was detected (and the window
  /// shrunk). Throws DomainError for values outside [0, 1].
  bool observe(double value);

  void reset();

  std::size_t width() const noexcept { return width_; }
  double mean() const noexcept;
  double variance() const noexcept;
  std::uint64_t detections() const noexcept { return detections_; }
  const Params& params() const noexcept { return params_; }

  /// Buckets held at each level (for invariant checks).
  std::vector<std::size_t> bucket_counts() const;
  /// Sum of all bucket sizes; equals width() by construction.
  std::size_t histogram_size() const;

 private:
  struct Bucket {
    double sum = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the bucket mean
  };

  void insert(double value);
  void compress();
  bool check_for_change();
  bool cut_detected(std::size_t n0, std::size_t n1, double sum0, double sum1) const;
  void drop_oldest();

  Params params_;
  std::vector<std::deque<Bucket>> levels_;
  std::size_t width_ = 0;
  double total_ = 0.0;
  double m2_ = 0.0;
  std::uint64_t ticks_ = 0;
  std::uint64_t detections_ = 0;
};

}  // namespace ucmab
