#include "welfare_order/extensions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "simulation_driver.hpp"
#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

constexpr double kTieScale = 1e-12;
constexpr double kIntensityTolerance = 1e-10;
constexpr double kSymmetryTolerance = 1e-12;

std::string format(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

EpsilonDistribution EpsilonDistribution::uniform(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("epsilon: scale must be > 0");
  }
  return EpsilonDistribution(Kind::kUniform, scale);
}

EpsilonDistribution EpsilonDistribution::symmetric_beta(double shape,
                                                        double scale) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ConfigError("epsilon: beta shape must be > 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("epsilon: scale must be > 0");
  }
  EpsilonDistribution d(Kind::kSymmetricBeta, scale);
  d.shape_ = shape;
  return d;
}

EpsilonDistribution EpsilonDistribution::table(std::vector<double> points,
                                               std::vector<double> cdf) {
  const std::size_t n = points.size();
  if (n < 2 || cdf.size() != n) {
    throw ConfigError("epsilon table: need at least two (point, cdf) pairs");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(points[j]) || !std::isfinite(cdf[j])) {
      throw ConfigError("epsilon table: non-finite entry");
    }
    if (j > 0 && !(points[j] > points[j - 1])) {
      throw ConfigError("epsilon table: points must be strictly increasing");
    }
    if (j > 0 && cdf[j] < cdf[j - 1]) {
      throw ConfigError("epsilon table: cdf must be nondecreasing");
    }
  }
  if (cdf.front() != 0.0 || cdf.back() != 1.0) {
    throw ConfigError("epsilon table: cdf must run from 0 to 1");
  }
  const double scale = points.back();
  if (!(scale > 0.0)) throw ConfigError("epsilon table: degenerate support");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(points[j] + points[n - 1 - j]) > kSymmetryTolerance * scale ||
        std::abs(cdf[j] + cdf[n - 1 - j] - 1.0) > kSymmetryTolerance) {
      throw ConfigError("epsilon table: distribution must be symmetric about 0");
    }
  }
  EpsilonDistribution d(Kind::kTable, scale);
  d.points_ = std::move(points);
  d.cdf_ = std::move(cdf);
  return d;
}

double EpsilonDistribution::cdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("epsilon cdf: NaN argument");
  switch (kind_) {
    case Kind::kUniform:
      return std::clamp(0.5 * (x / scale_ + 1.0), 0.0, 1.0);
    case Kind::kSymmetricBeta: {
      const double z = 0.5 * (x / scale_ + 1.0);
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return boost::math::ibeta(shape_, shape_, z);
    }
    case Kind::kTable:
      break;
  }
  if (x <= points_.front()) return 0.0;
  if (x >= points_.back()) return 1.0;
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - points_.begin());
  const double t = (x - points_[j - 1]) / (points_[j] - points_[j - 1]);
  return cdf_[j - 1] + t * (cdf_[j] - cdf_[j - 1]);
}

double EpsilonDistribution::signed_margin(double x) const {
  // Uniform is kept as a plain ratio so the unit case returns x unchanged.
  if (kind_ == Kind::kUniform) return std::clamp(x / scale_, -1.0, 1.0);
  return 2.0 * cdf(x) - 1.0;
}

std::vector<double> EpsilonDistribution::kinks() const {
  if (kind_ == Kind::kTable) return points_;
  return {-scale_, scale_};
}

std::string EpsilonDistribution::describe() const {
  switch (kind_) {
    case Kind::kUniform:
      return "uniform(scale=" + format(scale_) + ")";
    case Kind::kSymmetricBeta:
      return "symmetric-beta(shape=" + format(shape_) +
             ",scale=" + format(scale_) + ")";
    case Kind::kTable:
      break;
  }
  return "table(" + std::to_string(points_.size()) + " points)";
}

void validate_intensity(const IntensityModel& model) {
  if (!(model.theta_scale > 0.0) || !std::isfinite(model.theta_scale)) {
    throw ConfigError("intensity: theta_scale must be > 0");
  }
}

double intensity_second_moment(const IntensityModel& model) {
  validate_intensity(model);
  const double scale = model.theta_scale;
  const EpsilonDistribution& eps = model.epsilon;
  if (eps.kind() == EpsilonDistribution::Kind::kUniform &&
      eps.scale() >= scale) {
    // 2 G(theta) - 1 = theta / eps_scale on the whole support.
    return scale * scale * model.theta.second_moment() /
           (eps.scale() * eps.scale());
  }
  std::vector<double> splits;
  for (double k : eps.kinks()) {
    const double x = k / scale;
    if (x > 0.0 && x < 1.0) splits.push_back(x);
  }
  std::sort(splits.begin(), splits.end());
  const double moment = model.theta.expect_even(
      [&](double x) {
        const double y = eps.signed_margin(scale * x);
        return y * y;
      },
      splits, kIntensityTolerance);
  if (!(moment > 0.0)) {
    throw ConfigError("intensity: 2 G_eps(Theta) - 1 is degenerate");
  }
  return moment;
}

double rho_intensity(const IntensityModel& model,
                     const RepresentationRule& rule) {
  validate_intensity(model);
  const auto violations = validate_rule(rule);
  if (!violations.empty()) {
    throw ConfigError("invalid representation rule: " +
                      violations.front().message);
  }
  const double scale = model.theta_scale;
  const EpsilonDistribution& eps = model.epsilon;
  std::vector<double> splits = rule.jump_points();
  for (double k : eps.kinks()) {
    const double x = k / scale;
    if (x > 0.0 && x < 1.0) splits.push_back(x);
  }
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  splits.erase(std::remove_if(splits.begin(), splits.end(),
                              [](double x) { return !(x > 0.0 && x < 1.0); }),
               splits.end());

  const double cross = model.theta.expect_even(
      [&](double x) { return eps.signed_margin(scale * x) * rule(x); }, splits,
      kIntensityTolerance);
  const double y2 = model.theta.expect_even(
      [&](double x) {
        const double y = eps.signed_margin(scale * x);
        return y * y;
      },
      splits, kIntensityTolerance);
  const double r2 = model.theta.expect_even(
      [&](double x) { return rule(x) * rule(x); }, splits, kIntensityTolerance);
  const double denom = std::sqrt(y2 * r2);
  if (!(denom > 0.0) || !(cross > 0.0)) {
    throw ConfigError("intensity rho is not positive for rule " +
                      rule.describe());
  }
  return std::min(1.0, cross / denom);
}

namespace {

struct IntensityKernel {
  std::span<const double> sizes;
  std::span<const double> weights;
  const IntensityModel* model;
  const RepresentationRule* rule;

  detail::KernelOutput draw(CounterStream& stream, bool negate) const {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      double x = model->theta.sample(stream);
      if (negate) x = -x;
      s += sizes[i] * model->epsilon.signed_margin(model->theta_scale * x);
      t += weights[i] * (*rule)(x);
    }
    return {s, t};
  }
};

struct PreparedIntensity {
  std::vector<double> weights;
  detail::DecisionParams params;
};

PreparedIntensity prepare_intensity(const IntensityModel& model,
                                    const Society& society,
                                    const WeightAllocation& alloc,
                                    const RepresentationRule& rule,
                                    bool antithetic) {
  const auto violations = validate_rule(rule);
  if (!violations.empty()) {
    throw ConfigError("invalid representation rule: " +
                      violations.front().message);
  }
  PreparedIntensity prepared;
  prepared.weights = materialize_weights(society, alloc);
  double size_square = 0.0;
  for (double s : society.sizes()) size_square += s * s;
  prepared.params.sigma =
      std::sqrt(intensity_second_moment(model) * size_square);
  prepared.params.tie_threshold =
      kTieScale * std::accumulate(prepared.weights.begin(),
                                  prepared.weights.end(), 0.0);
  prepared.params.antithetic = antithetic;
  return prepared;
}

}  // namespace

SimulationResult simulate_intensity(const IntensityModel& model,
                                    const Society& society,
                                    const WeightAllocation& alloc,
                                    const RepresentationRule& rule,
                                    const RunOptions& run) {
  const PreparedIntensity prepared =
      prepare_intensity(model, society, alloc, rule, run.antithetic);
  const IntensityKernel kernel{society.sizes(), prepared.weights, &model,
                               &rule};
  SimulationResult result =
      detail::run_simulation(kernel, run, prepared.params,
                             ModelKind::kIntensity, society.group_count());
  result.welfare.description = "intensity; theta " + model.theta.describe() +
                               "; epsilon " + model.epsilon.describe() + "; " +
                               rule.describe();
  return result;
}

SampleDraw draw_intensity_sample(const IntensityModel& model,
                                 const Society& society,
                                 const WeightAllocation& alloc,
                                 const RepresentationRule& rule,
                                 std::uint64_t seed, std::uint64_t index) {
  const PreparedIntensity prepared =
      prepare_intensity(model, society, alloc, rule, false);
  const IntensityKernel kernel{society.sizes(), prepared.weights, &model,
                               &rule};
  return detail::draw_one(kernel, seed, index, prepared.params);
}

void validate_indep(const IndepModel& model, std::span<const double> weights) {
  using Kind = RepresentationRule::Kind;
  if (model.rule.kind() != Kind::kWinnerTakeAll &&
      model.rule.kind() != Kind::kProportional) {
    throw ConfigError(
        "independent model supports winner-take-all and proportional rules "
        "only");
  }
  const Society society(model.sizes);
  materialize_weights(
      society, WeightAllocation::explicit_weights(
                   std::vector<double>(weights.begin(), weights.end())));
  if (model.finite_population_scale) {
    const double k = *model.finite_population_scale;
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw ConfigError("finite_population_scale must be > 0");
    }
  }
}

namespace {

struct IndepKernel {
  std::span<const double> weights;
  const RepresentationRule* rule;
  std::vector<double> sizes;
  std::vector<double> root_sizes;
  // Finite-population mode.
  std::vector<std::uint64_t> ballots;
  double root_scale = 0.0;

  detail::KernelOutput draw(CounterStream& stream, bool negate) const {
    double s = 0.0, t = 0.0;
    if (ballots.empty()) {
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        double z = stream.normal();
        if (negate) z = -z;
        s += root_sizes[i] * z;
        t += weights[i] * (*rule)(z / root_sizes[i]);
      }
      return {s, t};
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const std::uint64_t m = ballots[i];
      std::uint64_t yes = 0;
      std::uint64_t left = m;
      while (left >= 64) {
        yes += static_cast<std::uint64_t>(std::popcount(stream.next_u64()));
        left -= 64;
      }
      if (left > 0) {
        const std::uint64_t mask = (std::uint64_t{1} << left) - 1;
        yes += static_cast<std::uint64_t>(std::popcount(stream.next_u64() & mask));
      }
      double margin = (2.0 * static_cast<double>(yes) - static_cast<double>(m)) /
                      static_cast<double>(m);
      if (negate) margin = -margin;
      const double x = root_scale * margin;
      s += sizes[i] * x;
      t += weights[i] * (*rule)(x);
    }
    return {s, t};
  }
};

IndepKernel make_indep_kernel(const IndepModel& model,
                              std::span<const double> weights,
                              detail::DecisionParams& params,
                              bool antithetic) {
  validate_indep(model, weights);
  IndepKernel kernel;
  kernel.weights = weights;
  kernel.rule = &model.rule;
  kernel.sizes = model.sizes;
  double total = 0.0;
  for (double s : model.sizes) {
    kernel.root_sizes.push_back(std::sqrt(s));
    total += s;
  }
  if (model.finite_population_scale) {
    const double k = *model.finite_population_scale;
    kernel.root_scale = std::sqrt(k);
    for (double s : model.sizes) {
      kernel.ballots.push_back(
          std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(k * s))));
    }
  }
  params.sigma = std::sqrt(total);
  // Ties have probability zero in the limit model; only exact zeros count.
  params.tie_threshold = 0.0;
  params.antithetic = antithetic;
  return kernel;
}

}  // namespace

SimulationResult simulate_indep(const IndepModel& model,
                                std::span<const double> weights,
                                const RunOptions& run) {
  detail::DecisionParams params{};
  const IndepKernel kernel =
      make_indep_kernel(model, weights, params, run.antithetic);
  SimulationResult result = detail::run_simulation(
      kernel, run, params, ModelKind::kIndependent, model.sizes.size());
  result.welfare.description = "independent; " + model.rule.describe();
  return result;
}

SampleDraw draw_indep_sample(const IndepModel& model,
                             std::span<const double> weights,
                             std::uint64_t seed, std::uint64_t index) {
  detail::DecisionParams params{};
  const IndepKernel kernel = make_indep_kernel(model, weights, params, false);
  return detail::draw_one(kernel, seed, index, params);
}

double indep_asymptotic_p(double c_sqrt_star) {
  if (!(c_sqrt_star >= 0.0 && c_sqrt_star <= 1.0)) {
    throw ConfigError("indep_asymptotic_p: c must lie in [0, 1]");
  }
  return std::acos(std::sqrt(2.0 / std::numbers::pi) * c_sqrt_star) / std::numbers::pi;
}

}  // namespace welfare_order
