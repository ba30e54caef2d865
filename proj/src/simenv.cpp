#include "ucmab/simenv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ucmab/errors.hpp"

namespace ucmab {

namespace {

double dot(const std::vector<double>& w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

double lerp_between(double a, double b, double s) {
  const double v = (1.0 - s) * a + s * b;
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

bool all_finite(const SurfaceParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(p.lift_weights.begin(), p.lift_weights.end(), finite) &&
         std::all_of(p.base_weights.begin(), p.base_weights.end(), finite) && finite(p.lift_offset) &&
         finite(p.steepness) && finite(p.lift_max) && finite(p.lift_shift) && finite(p.base_offset);
}

void check_shape(const SurfaceParams& p, std::size_t dimension, const char* which) {
  if (p.lift_weights.size() != dimension || p.base_weights.size() != dimension)
    throw ConfigError(std::string(which) + " surface weights must have one entry per context dimension");
  if (!all_finite(p)) throw ConfigError(std::string(which) + " surface parameters must be finite");
}

constexpr std::size_t kGridPoints = 1000;

}  // namespace

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

SurfaceParams SurfaceParams::interpolate(const SurfaceParams& a, const SurfaceParams& b, double s) {
  if (a.lift_weights.size() != b.lift_weights.size() || a.base_weights.size() != b.base_weights.size())
    throw DomainError("cannot interpolate surfaces of different dimension");
  SurfaceParams out = a;
  for (std::size_t i = 0; i < a.lift_weights.size(); ++i)
    out.lift_weights[i] = lerp_between(a.lift_weights[i], b.lift_weights[i], s);
  for (std::size_t i = 0; i < a.base_weights.size(); ++i)
    out.base_weights[i] = lerp_between(a.base_weights[i], b.base_weights[i], s);
  out.lift_offset = lerp_between(a.lift_offset, b.lift_offset, s);
  out.steepness = lerp_between(a.steepness, b.steepness, s);
  out.lift_max = lerp_between(a.lift_max, b.lift_max, s);
  out.lift_shift = lerp_between(a.lift_shift, b.lift_shift, s);
  out.base_offset = lerp_between(a.base_offset, b.base_offset, s);
  return out;
}

double ResponseSurface::lift(const SurfaceParams& theta, std::span<const double> x) const {
  return theta.lift_max * logistic(theta.steepness * (dot(theta.lift_weights, x) + theta.lift_offset)) -
         theta.lift_shift;
}

double ResponseSurface::base(const SurfaceParams& theta, std::span<const double> x) const {
  return std::clamp(dot(theta.base_weights, x) + theta.base_offset, base_floor, base_ceiling);
}

std::string_view to_string(DriftKind kind) noexcept {
  switch (kind) {
    case DriftKind::none: return "none";
    case DriftKind::sudden: return "sudden";
    case DriftKind::gradual: return "gradual";
  }
  return "none";
}

DriftKind drift_kind_from_string(std::string_view name) {
  if (name == "none") return DriftKind::none;
  if (name == "sudden") return DriftKind::sudden;
  if (name == "gradual") return DriftKind::gradual;
  throw ConfigError("unknown drift kind '" + std::string(name) + "'");
}

SurfaceParams DriftSchedule::at(std::uint64_t t) const {
  switch (kind) {
    case DriftKind::none: return start;
    case DriftKind::sudden: return t < t_change ? start : end;
    case DriftKind::gradual:
      if (t <= t_begin) return start;
      if (t >= t_end) return end;
      return SurfaceParams::interpolate(
          start, end, static_cast<double>(t - t_begin) / static_cast<double>(t_end - t_begin));
  }
  return start;
}

std::vector<std::uint64_t> DriftSchedule::markers() const {
  switch (kind) {
    case DriftKind::none: return {};
    case DriftKind::sudden: return {t_change};
    case DriftKind::gradual: return {t_begin, t_end};
  }
  return {};
}

std::string_view to_string(IndividualType type) noexcept {
  switch (type) {
    case IndividualType::X1: return "X1";
    case IndividualType::X2: return "X2";
    case IndividualType::X3: return "X3";
    case IndividualType::X4: return "X4";
  }
  return "X2";
}

void validate_surface(std::size_t dimension, const ResponseSurface& surface, const SurfaceParams& theta) {
  std::vector<double> point(dimension, 0.0);
  auto check = [&] {
    const std::span<const double> x(point);
    const double b = surface.base(theta, x);
    const double p1 = b + surface.lift(theta, x);
    if (!(b >= 0.0 && b <= 1.0 && p1 >= 0.0 && p1 <= 1.0)) {
      std::string where;
      for (double v : point) where += (where.empty() ? "" : ", ") + std::to_string(v);
      throw SpecificationError("response probabilities leave [0, 1] at x = (" + where + "): p0 = " +
                               std::to_string(b) + ", p1 = " + std::to_string(p1));
    }
  };
  auto grid = [](std::size_t i) { return static_cast<double>(i) / static_cast<double>(kGridPoints - 1); };

  if (dimension == 1) {
    for (std::size_t i = 0; i < kGridPoints; ++i) {
      point[0] = grid(i);
      check();
    }
    return;
  }
  const std::array<double, 3> pins{0.0, 0.5, 1.0};
  for (std::size_t a = 0; a < dimension; ++a) {
    for (std::size_t b = a + 1; b < dimension; ++b) {
      for (std::size_t pin = 0; pin < (dimension > 2 ? pins.size() : 1); ++pin) {
        std::fill(point.begin(), point.end(), pins[pin]);
        for (std::size_t i = 0; i < kGridPoints; ++i) {
          point[a] = grid(i);
          for (std::size_t j = 0; j < kGridPoints; ++j) {
            point[b] = grid(j);
            check();
          }
        }
      }
    }
  }
}

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec)), tau_(0.0) {
  if (spec_.dimension < 1) throw ConfigError("context dimension must be >= 1");
  if (spec_.horizon < 1) throw ConfigError("horizon must be >= 1");
  const auto& s = spec_.surface;
  if (!(s.base_floor >= 0.0 && s.base_ceiling <= 1.0 && s.base_floor <= s.base_ceiling))
    throw ConfigError("base clamp must satisfy 0 <= floor <= ceiling <= 1");
  spec_.reward_spec.validate();
  tau_ = compute_threshold(spec_.reward_spec);

  auto& schedule = spec_.schedule;
  check_shape(schedule.start, spec_.dimension, "start");
  std::vector<SurfaceParams> reachable{schedule.start};
  switch (schedule.kind) {
    case DriftKind::none:
      schedule.end = schedule.start;
      break;
    case DriftKind::sudden:
      check_shape(schedule.end, spec_.dimension, "end");
      reachable.push_back(schedule.end);
      break;
    case DriftKind::gradual:
      check_shape(schedule.end, spec_.dimension, "end");
      if (!(schedule.t_begin < schedule.t_end)) throw ConfigError("gradual drift needs t_begin < t_end");
      for (int k = 1; k <= 10; ++k) reachable.push_back(SurfaceParams::interpolate(schedule.start, schedule.end, k / 10.0));
      break;
  }
  for (const auto& theta : reachable) validate_surface(spec_.dimension, spec_.surface, theta);
}

ContextBounds Environment::bounds() const { return ContextBounds(spec_.dimension, Interval{0.0, 1.0}); }

ContextPoint Environment::sample_context(Rng& rng) const {
  std::vector<double> x(spec_.dimension);
  for (double& v : x) v = rng.uniform();
  return ContextPoint(std::move(x));
}

double Environment::lift(const ContextPoint& x, std::uint64_t t) const {
  if (x.dimension() != spec_.dimension) throw DomainError("context dimension does not match environment");
  return spec_.surface.lift(parameters_at(t), x.features());
}

double Environment::true_probability(const ContextPoint& x, Treatment arm, std::uint64_t t) const {
  if (x.dimension() != spec_.dimension) throw DomainError("context dimension does not match environment");
  const SurfaceParams theta = parameters_at(t);
  const double b = spec_.surface.base(theta, x.features());
  return arm == Treatment::treated ? b + spec_.surface.lift(theta, x.features()) : b;
}

Outcome Environment::respond(const ContextPoint& x, Treatment arm, std::uint64_t t, Rng& rng) const {
  return Outcome{rng.bernoulli(true_probability(x, arm, t))};
}

Treatment Environment::optimal_action(const ContextPoint& x, std::uint64_t t) const {
  return select_by_threshold(lift(x, t), tau_);
}

IndividualType Environment::classify_individual(const ContextPoint& x, std::uint64_t t) const {
  const double p0 = true_probability(x, Treatment::control, t);
  const double p1 = true_probability(x, Treatment::treated, t);
  auto binary = [](double p) { return p == 0.0 || p == 1.0; };
  if (!binary(p0) || !binary(p1))
    throw DomainError("individual type is only defined for deterministic responses");
  if (p0 == 0.0) return p1 == 1.0 ? IndividualType::X1 : IndividualType::X2;
  return p1 == 1.0 ? IndividualType::X3 : IndividualType::X4;
}

double step_regret(Treatment chosen, Treatment optimal) noexcept { return chosen == optimal ? 0.0 : 1.0; }

}  // namespace ucmab
