#include "ucmab/adwin.hpp"

#include <algorithm>
#include <cmath>

#include "ucmab/errors.hpp"

namespace ucmab {

namespace {
std::size_t bucket_size(std::size_t level) { return std::size_t{1} << level; }
}  // namespace

AdwinDetector::AdwinDetector() : AdwinDetector(Params{}) {}

AdwinDetector::AdwinDetector(Params params) : params_(params) {
  if (!(params_.delta > 0.0 && params_.delta < 1.0)) throw ConfigError("ADWIN delta must lie in (0, 1)");
  if (params_.max_buckets < 2) throw ConfigError("ADWIN needs at least 2 buckets per level");
  if (params_.clock < 1) throw ConfigError("ADWIN clock must be >= 1");
  if (params_.min_subwindow < 1) throw ConfigError("ADWIN minimum sub-window must be >= 1");
}

void AdwinDetector::reset() {
  levels_.clear();
  width_ = 0;
  total_ = 0.0;
  m2_ = 0.0;
  ticks_ = 0;
}

double AdwinDetector::mean() const noexcept { return width_ == 0 ? 0.0 : total_ / static_cast<double>(width_); }

double AdwinDetector::variance() const noexcept {
  return width_ == 0 ? 0.0 : std::max(0.0, m2_) / static_cast<double>(width_);
}

bool AdwinDetector::observe(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("ADWIN input must lie in [0, 1]");
  insert(value);
  compress();
  const bool change = check_for_change();
  if (change) ++detections_;
  return change;
}

void AdwinDetector::insert(double value) {
  if (levels_.empty()) levels_.emplace_back();
  levels_.front().push_front({value, 0.0});
  if (width_ > 0) {
    const double w = static_cast<double>(width_);
    const double delta = value - total_ / w;
    m2_ += w / (w + 1.0) * delta * delta;
  }
  ++width_;
  total_ += value;
}

void AdwinDetector::compress() {
  for (std::size_t level = 0; level < levels_.size(); ++level) {
    auto& row = levels_[level];
    if (row.size() <= params_.max_buckets) break;
    const Bucket older = row.back();
    row.pop_back();
    const Bucket newer = row.back();
    row.pop_back();
    const double n = static_cast<double>(bucket_size(level));
    const double diff = older.sum / n - newer.sum / n;
    const Bucket merged{older.sum + newer.sum, older.m2 + newer.m2 + n * n * diff * diff / (2.0 * n)};
    if (level + 1 == levels_.size()) levels_.emplace_back();
    levels_[level + 1].push_front(merged);
  }
}

bool AdwinDetector::cut_detected(std::size_t n0, std::size_t n1, double sum0, double sum1) const {
  const double a = static_cast<double>(n0);
  const double b = static_cast<double>(n1);
  const double k = static_cast<double>(params_.min_subwindow);
  const double gap = std::abs(sum0 / a - sum1 / b);
  const double d = std::log(2.0 * std::log(static_cast<double>(width_)) / params_.delta);
  const double m = 1.0 / (a - k + 1.0) + 1.0 / (b - k + 1.0);
  const double eps = std::sqrt(2.0 * m * variance() * d) + 2.0 / 3.0 * d * m;
  return gap > eps;
}

bool AdwinDetector::check_for_change() {
  ++ticks_;
  if (ticks_ % params_.clock != 0 || width_ <= 2 * params_.min_subwindow) return false;

  bool change = false;
  bool shrink = true;
  while (shrink && width_ > 2 * params_.min_subwindow) {
    shrink = false;
    std::size_t n0 = 0;
    double sum0 = 0.0;
    // Walk from the oldest bucket toward the newest; W0 grows, W1 shrinks.
    for (std::size_t level = levels_.size(); level-- > 0 && !shrink;) {
      const auto& row = levels_[level];
      for (std::size_t b = row.size(); b-- > 0;) {
        if (level == 0 && b == 0) break;  // W1 must keep at least the newest bucket
        n0 += bucket_size(level);
        sum0 += row[b].sum;
        const std::size_t n1 = width_ - n0;
        if (n0 >= params_.min_subwindow && n1 >= params_.min_subwindow &&
            cut_detected(n0, n1, sum0, total_ - sum0)) {
          shrink = true;
          change = true;
          drop_oldest();
          break;
        }
      }
    }
  }
  return change;
}

void AdwinDetector::drop_oldest() {
  while (!levels_.empty() && levels_.back().empty()) levels_.pop_back();
  if (levels_.empty()) return;
  const std::size_t level = levels_.size() - 1;
  const Bucket oldest = levels_.back().back();
  levels_.back().pop_back();

  const double n = static_cast<double>(bucket_size(level));
  width_ -= bucket_size(level);
  total_ -= oldest.sum;
  if (width_ == 0) {
    total_ = 0.0;
    m2_ = 0.0;
  } else {
    const double rest = static_cast<double>(width_);
    const double diff = oldest.sum / n - total_ / rest;
    m2_ -= oldest.m2 + n * rest * diff * diff / (n + rest);
    m2_ = std::max(0.0, m2_);
  }
  while (!levels_.empty() && levels_.back().empty()) levels_.pop_back();
}

std::vector<std::size_t> AdwinDetector::bucket_counts() const {
  std::vector<std::size_t> counts;
  for (const auto& row : levels_) counts.push_back(row.size());
  return counts;
}

std::size_t AdwinDetector::histogram_size() const {
  std::size_t size = 0;
  for (std::size_t level = 0; level < levels_.size(); ++level) size += levels_[level].size() * bucket_size(level);
  return size;
}

}  // namespace ucmab
