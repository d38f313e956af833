#include "welfare_order/engine.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "simulation_driver.hpp"
#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

constexpr double kTieScale = 1e-12;

struct CorrelatedKernel {
  std::span<const double> sizes;
  std::span<const double> weights;
  const MarginDistribution* margin;
  const RepresentationRule* rule;

  detail::KernelOutput draw(CounterStream& stream, bool negate) const {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      double x = margin->sample(stream);
      if (negate) x = -x;
      s += sizes[i] * x;
      t += weights[i] * (*rule)(x);
    }
    return {s, t};
  }
};

struct PreparedSpec {
  std::vector<double> weights;
  detail::DecisionParams params;
};

PreparedSpec prepare(const SimulationSpec& spec) {
  validate_spec(spec);
  PreparedSpec prepared;
  prepared.weights = materialize_weights(spec.society, spec.alloc);
  double size_square = 0.0;
  for (double s : spec.society.sizes()) size_square += s * s;
  const double weight_total =
      std::accumulate(prepared.weights.begin(), prepared.weights.end(), 0.0);
  prepared.params.sigma =
      std::sqrt(spec.margin.second_moment() * size_square);
  prepared.params.tie_threshold = kTieScale * weight_total;
  prepared.params.antithetic = spec.run.antithetic;
  return prepared;
}

double sample_variance(double sum, double sum2, std::uint64_t count) {
  const double m = static_cast<double>(count);
  return std::max(0.0, (sum2 - sum * sum / m) / (m - 1.0));
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kCorrelated:
      return "correlated";
    case ModelKind::kIntensity:
      return "intensity";
    case ModelKind::kIndependent:
      return "independent";
  }
  return "?";
}

void validate_spec(const SimulationSpec& spec) {
  const auto violations = validate_rule(spec.rule);
  if (!violations.empty()) {
    throw ConfigError("invalid representation rule: " +
                      violations.front().message);
  }
  detail::check_run(spec.run);
}

void SampleMoments::add(double w, double s, bool tie) noexcept {
  const double abs_s = std::abs(s);
  const double gap = 0.5 * (abs_s - w);
  ++count;
  sum_w += w;
  sum_w2 += w * w;
  sum_abs_s += abs_s;
  sum_gap += gap;
  sum_gap2 += gap * gap;
  sum_s += s;
  sum_s2 += s * s;
  if (w < 0.0) ++negatives;
  if (tie) ++ties;
}

void SampleMoments::merge(const SampleMoments& other) noexcept {
  count += other.count;
  sum_w += other.sum_w;
  sum_w2 += other.sum_w2;
  sum_abs_s += other.sum_abs_s;
  sum_gap += other.sum_gap;
  sum_gap2 += other.sum_gap2;
  sum_s += other.sum_s;
  sum_s2 += other.sum_s2;
  negatives += other.negatives;
  ties += other.ties;
}

SampleMoments moments_from_samples(std::span<const double> welfare,
                                   std::span<const double> s_norm) {
  if (welfare.size() != s_norm.size()) {
    throw std::invalid_argument("moments_from_samples: length mismatch");
  }
  SampleMoments moments;
  for (std::size_t j = 0; j < welfare.size(); ++j) {
    moments.add(welfare[j], s_norm[j], false);
  }
  return moments;
}

ObjectiveEstimates estimate_objectives(const SampleMoments& moments) {
  if (moments.count == 0) {
    throw std::invalid_argument("estimate_objectives: no samples");
  }
  ObjectiveEstimates est;
  const double m = static_cast<double>(moments.count);
  est.u_hat = moments.sum_w / m;
  est.mean_abs_s = moments.sum_abs_s / m;
  est.delta_hat = 0.5 * (est.mean_abs_s - est.u_hat);
  est.p_hat = static_cast<double>(moments.negatives) / m;
  if (moments.count == 1) {
    est.u_se = est.delta_se = est.p_se = kInfinity;
    return est;
  }
  est.u_se = std::sqrt(
      sample_variance(moments.sum_w, moments.sum_w2, moments.count) / m);
  est.delta_se = std::sqrt(
      sample_variance(moments.sum_gap, moments.sum_gap2, moments.count) / m);
  est.p_se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / m);
  return est;
}

ObjectiveEstimates estimate_objectives(const SimulationResult& result) {
  return estimate_objectives(result.moments);
}

SimulationResult simulate(const SimulationSpec& spec) {
  const PreparedSpec prepared = prepare(spec);
  const CorrelatedKernel kernel{spec.society.sizes(), prepared.weights,
                                &spec.margin, &spec.rule};
  SimulationResult result =
      detail::run_simulation(kernel, spec.run, prepared.params,
                             ModelKind::kCorrelated,
                             spec.society.group_count());
  result.welfare.description = "correlated; " + spec.alloc.describe() + "; " +
                               spec.rule.describe() + "; " +
                               spec.margin.describe();
  return result;
}

SampleDraw draw_sample(const SimulationSpec& spec, std::uint64_t index) {
  const PreparedSpec prepared = prepare(spec);
  const CorrelatedKernel kernel{spec.society.sizes(), prepared.weights,
                                &spec.margin, &spec.rule};
  return detail::draw_one(kernel, spec.run.seed, index, prepared.params);
}

std::vector<ConvergenceRow> convergence_sweep(
    const SimulationSpec& base, std::span<const std::size_t> n_values,
    const SocietyGenerator& generator) {
  if (n_values.empty()) throw ConfigError("convergence sweep: no n values");
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] == 0) throw ConfigError("convergence sweep: n must be >= 1");
    if (k > 0 && n_values[k] <= n_values[k - 1]) {
      throw ConfigError("convergence sweep: n values must be ascending");
    }
  }
  const double correlation = rho(base.margin, base.rule);

  std::vector<ConvergenceRow> rows;
  rows.reserve(n_values.size());
  for (const std::size_t n : n_values) {
    SimulationSpec spec = base;
    if (const auto* pattern = std::get_if<PatternSizes>(&generator)) {
      spec.society = Society::repeat_pattern(pattern->sizes, n);
      if (!pattern->weights.empty()) {
        if (pattern->weights.size() != pattern->sizes.size()) {
          throw ConfigError(
              "convergence sweep: weight pattern and size pattern differ");
        }
        std::vector<double> weights(n);
        for (std::size_t i = 0; i < n; ++i) {
          weights[i] = pattern->weights[i % pattern->weights.size()];
        }
        spec.alloc = WeightAllocation::explicit_weights(std::move(weights));
      } else if (!base.alloc.is_law()) {
        throw ConfigError(
            "convergence sweep: explicit allocations need a weight pattern");
      }
    } else {
      const auto& limit = std::get<LimitSizes>(generator);
      if (!base.alloc.is_law()) {
        throw ConfigError(
            "convergence sweep: drawn societies need a weight law");
      }
      spec.society =
          Society::draw_from(limit.limit, n, derive_seed(limit.seed, n));
    }

    const SimulationResult result = simulate(spec);
    const auto weights = materialize_weights(spec.society, spec.alloc);

    ConvergenceRow row;
    row.n = n;
    row.cosine = cosine(spec.society.sizes(), weights);
    row.limits = asymptotic_objectives(correlation, row.cosine);
    row.estimates = result.estimates;
    row.u_gap = std::abs(row.estimates.u_hat - row.limits.u_limit);
    row.delta_gap = std::abs(row.estimates.delta_hat - row.limits.delta_limit);
    row.p_gap = std::abs(row.estimates.p_hat - row.limits.p_limit);
    row.ks = ks_distance(result.welfare, SkewNormal{row.limits.lambda});
    row.tie_count = result.tie_count;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace welfare_order
