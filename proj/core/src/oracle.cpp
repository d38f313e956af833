#include "welfare_order/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

constexpr std::uint64_t kAutoRationalProfiles = std::uint64_t{1} << 20;
constexpr double kFloatTolerance = 1e-12;

bool is_integer(double x) {
  return std::isfinite(x) && std::abs(x) < 9.0e15 && x == std::floor(x);
}

cpp_rational dyadic(double x) {
  if (x == 0.0) return 0;
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  cpp_rational r = cpp_int(static_cast<std::int64_t>(std::ldexp(mantissa, 53)));
  exponent -= 53;
  const cpp_int scale = cpp_int(1) << std::abs(exponent);
  if (exponent >= 0) return r * scale;
  return r / scale;
}

// Inputs arrive as doubles; 0.2 is meant as 1/5, not as its binary
// expansion. Take the smallest-denominator continued-fraction convergent that
// rounds back to x, and fall back to the exact binary value.
cpp_rational recover_rational(double x) {
  if (is_integer(x)) return cpp_int(static_cast<std::int64_t>(x));
  if (std::abs(x) < 1e6) {
    double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int iter = 0; iter < 40; ++iter) {
      const double a = std::floor(r);
      const double h = a * h1 + h0;
      const double k = a * k1 + k0;
      if (k > 1e7) break;
      if (h / k == x) {
        return cpp_rational(cpp_int(static_cast<std::int64_t>(h)),
                            cpp_int(static_cast<std::int64_t>(k)));
      }
      h0 = h1;
      h1 = h;
      k0 = k1;
      k1 = k;
      const double frac = r - a;
      if (frac == 0.0) break;
      r = 1.0 / frac;
    }
  }
  return dyadic(x);
}

std::string to_text(const cpp_rational& r) { return r.str(); }

struct Inputs {
  std::vector<double> sizes;
  std::vector<double> weights;
  std::vector<Atom> atoms;
  std::vector<double> rule_values;  // r(x) per atom
  std::uint64_t profiles = 0;
};

Inputs prepare_inputs(const Society& society, const WeightAllocation& alloc,
                      const RepresentationRule& rule,
                      const MarginDistribution& margin,
                      const ExactOptions& options) {
  if (!margin.is_discrete()) {
    throw ConfigError("exact mode requires discrete margins");
  }
  const auto violations = validate_rule(rule);
  if (!violations.empty()) {
    throw ConfigError("invalid representation rule: " +
                      violations.front().message);
  }
  Inputs in;
  in.sizes.assign(society.sizes().begin(), society.sizes().end());
  in.weights = materialize_weights(society, alloc);
  in.atoms = margin.support();
  for (const Atom& atom : in.atoms) in.rule_values.push_back(rule(atom.value));

  const double n = static_cast<double>(in.sizes.size());
  const double k = static_cast<double>(in.atoms.size());
  const double log_profiles = n * std::log(k);
  if (!(options.budget > 0.0)) throw ConfigError("exact budget must be > 0");
  if (log_profiles > std::log(options.budget / n) + 1e-9 ||
      log_profiles > 62.0 * std::log(2.0)) {
    throw BudgetError("exact enumeration of " + std::to_string(in.atoms.size()) +
                      "^" + std::to_string(in.sizes.size()) +
                      " profiles exceeds the budget of " +
                      std::to_string(static_cast<long long>(options.budget)) +
                      " operations");
  }
  in.profiles = 1;
  for (std::size_t i = 0; i < in.sizes.size(); ++i) in.profiles *= in.atoms.size();
  if (static_cast<double>(in.profiles) * n > options.budget) {
    throw BudgetError("exact enumeration exceeds the operation budget");
  }
  return in;
}

void finish_moments(ExactDistribution& out) {
  double u = 0, delta = 0, p = 0, w2 = 0, gap2 = 0, total = 0;
  for (const ExactAtom& atom : out.atoms) {
    const double gap = atom.value < 0.0 ? -atom.value : 0.0;
    u += atom.value * atom.probability;
    delta += gap * atom.probability;
    w2 += atom.value * atom.value * atom.probability;
    gap2 += gap * gap * atom.probability;
    if (atom.value < 0.0) p += atom.probability;
    total += atom.probability;
  }
  if (!out.rational) {
    out.u = u;
    out.delta = delta;
    out.p = p;
  }
  out.var_w = std::max(0.0, w2 - out.u * out.u);
  out.var_gap = std::max(0.0, gap2 - out.delta * out.delta);
  out.total_probability = total;
}

ExactDistribution enumerate_rational(const Inputs& in) {
  const std::size_t n = in.sizes.size();
  const std::size_t k = in.atoms.size();

  std::vector<cpp_rational> prob(k), x(k), rv(k);
  cpp_rational prob_total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    prob[j] = recover_rational(in.atoms[j].probability);
    x[j] = recover_rational(in.atoms[j].value);
    rv[j] = recover_rational(in.rule_values[j]);
    prob_total += prob[j];
  }
  // Recovered probabilities may miss 1 by a rounding residue.
  for (auto& q : prob) q /= prob_total;

  cpp_rational second_moment = 0;
  for (std::size_t j = 0; j < k; ++j) second_moment += prob[j] * x[j] * x[j];
  cpp_rational size_square = 0;
  std::vector<cpp_rational> s(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = recover_rational(in.sizes[i]);
    a[i] = recover_rational(in.weights[i]);
    size_square += s[i] * s[i];
  }
  const cpp_rational sigma2 = second_moment * size_square;

  // Per-group contributions, indexed [i * k + j].
  std::vector<cpp_rational> ds(n * k), dt(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      ds[i * k + j] = s[i] * x[j];
      dt[i * k + j] = a[i] * rv[j];
    }
  }

  // Welfare atoms keyed by the signed numerator D * S.
  std::map<cpp_rational, cpp_rational> mass;
  std::vector<cpp_rational> ps(n + 1), pt(n + 1), pp(n + 1);
  std::vector<std::size_t> index(n, 0);
  ps[0] = 0;
  pt[0] = 0;
  pp[0] = 1;
  // Lexicographic odometer over support indices with prefix sums.
  std::size_t depth = 0;
  for (;;) {
    for (std::size_t i = depth; i < n; ++i) {
      const std::size_t c = i * k + index[i];
      ps[i + 1] = ps[i] + ds[c];
      pt[i + 1] = pt[i] + dt[c];
      pp[i + 1] = pp[i] * prob[index[i]];
    }
    const cpp_rational& S = ps[n];
    const int sign_t = pt[n].sign();
    if (sign_t > 0) {
      mass[S] += pp[n];
    } else if (sign_t < 0) {
      mass[-S] += pp[n];
    } else {
      const cpp_rational half = pp[n] / 2;
      mass[S] += half;
      mass[-S] += half;
    }
    std::size_t i = n;
    while (i > 0 && ++index[i - 1] == k) index[--i] = 0;
    if (i == 0) break;
    depth = i - 1;
  }

  ExactDistribution out;
  out.rational = true;
  out.sigma = std::sqrt(sigma2.convert_to<double>());
  cpp_rational u_num = 0, delta_num = 0, p = 0, total = 0;
  for (const auto& [numerator, q] : mass) {
    ExactAtom atom;
    atom.value = numerator.convert_to<double>() / out.sigma;
    atom.probability = q.convert_to<double>();
    atom.numerator = to_text(numerator);
    atom.probability_exact = to_text(q);
    out.atoms.push_back(std::move(atom));
    u_num += numerator * q;
    if (numerator.sign() < 0) {
      delta_num -= numerator * q;
      p += q;
    }
    total += q;
  }
  if (total != 1) throw std::logic_error("exact enumeration lost mass");
  out.u = u_num.convert_to<double>() / out.sigma;
  out.delta = delta_num.convert_to<double>() / out.sigma;
  out.p = p.convert_to<double>();
  out.sigma_squared_exact = to_text(sigma2);
  out.u_exact = "(" + to_text(u_num) + ")/sqrt(" + out.sigma_squared_exact + ")";
  out.delta_exact =
      "(" + to_text(delta_num) + ")/sqrt(" + out.sigma_squared_exact + ")";
  out.p_exact = to_text(p);
  finish_moments(out);
  out.total_probability = 1.0;
  return out;
}

ExactDistribution enumerate_float(const Inputs& in,
                                  const MarginDistribution& margin) {
  const std::size_t n = in.sizes.size();
  const std::size_t k = in.atoms.size();

  double size_square = 0, size_total = 0, weight_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    size_square += in.sizes[i] * in.sizes[i];
    size_total += in.sizes[i];
    weight_total += in.weights[i];
  }
  const double sigma = std::sqrt(margin.second_moment() * size_square);
  const double s_snap = kFloatTolerance * size_total;
  const double t_tie = kFloatTolerance * weight_total;

  std::vector<double> ds(n * k), dt(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      ds[i * k + j] = in.sizes[i] * in.atoms[j].value;
      dt[i * k + j] = in.weights[i] * in.rule_values[j];
    }
  }

  std::map<double, double> mass;
  std::vector<double> ps(n + 1, 0.0), pt(n + 1, 0.0), pp(n + 1, 1.0);
  std::vector<std::size_t> index(n, 0);
  std::size_t depth = 0;
  for (;;) {
    for (std::size_t i = depth; i < n; ++i) {
      const std::size_t c = i * k + index[i];
      ps[i + 1] = ps[i] + ds[c];
      pt[i + 1] = pt[i] + dt[c];
      pp[i + 1] = pp[i] * in.atoms[index[i]].probability;
    }
    double S = ps[n];
    if (std::abs(S) <= s_snap) S = 0.0;
    const double T = pt[n];
    if (T > t_tie) {
      mass[S] += pp[n];
    } else if (T < -t_tie) {
      mass[-S] += pp[n];
    } else {
      mass[S] += 0.5 * pp[n];
      mass[-S] += 0.5 * pp[n];
    }
    std::size_t i = n;
    while (i > 0 && ++index[i - 1] == k) index[--i] = 0;
    if (i == 0) break;
    depth = i - 1;
  }

  ExactDistribution out;
  out.sigma = sigma;
  const double merge_tol = kFloatTolerance * std::max(1.0, size_total);
  double last = 0.0;
  for (const auto& [numerator, q] : mass) {
    if (!out.atoms.empty() && numerator - last <= merge_tol) {
      out.atoms.back().probability += q;
      continue;
    }
    last = numerator;
    ExactAtom atom;
    atom.value = numerator / sigma;
    atom.probability = q;
    out.atoms.push_back(atom);
  }
  finish_moments(out);
  return out;
}

}  // namespace

ExactDistribution exact_welfare(const Society& society,
                                const WeightAllocation& alloc,
                                const RepresentationRule& rule,
                                const MarginDistribution& margin,
                                const ExactOptions& options) {
  const Inputs in = prepare_inputs(society, alloc, rule, margin, options);
  bool rational = options.mode == ExactMode::kRational;
  if (options.mode == ExactMode::kAuto) {
    rational = in.profiles <= kAutoRationalProfiles &&
               std::all_of(in.sizes.begin(), in.sizes.end(), is_integer) &&
               std::all_of(in.weights.begin(), in.weights.end(), is_integer);
  }
  ExactDistribution out =
      rational ? enumerate_rational(in) : enumerate_float(in, margin);
  out.profiles = in.profiles;
  return out;
}

ExactComparison exact_vs_simulation(const SimulationSpec& spec,
                                    const ExactOptions& options) {
  ExactComparison cmp;
  cmp.exact =
      exact_welfare(spec.society, spec.alloc, spec.rule, spec.margin, options);
  const SimulationResult sim = simulate(spec);
  cmp.estimates = sim.estimates;
  cmp.samples = sim.samples;

  const double m = static_cast<double>(sim.samples);
  const ExactDistribution& ex = cmp.exact;
  cmp.u_gap = std::abs(cmp.estimates.u_hat - ex.u);
  cmp.delta_gap = std::abs(cmp.estimates.delta_hat - ex.delta);
  cmp.p_gap = std::abs(cmp.estimates.p_hat - ex.p);
  cmp.u_se_exact = std::sqrt(ex.var_w / m);
  cmp.delta_se_exact = std::sqrt(ex.var_gap / m);
  cmp.p_se_exact = std::sqrt(ex.p * (1.0 - ex.p) / m);
  // The floor absorbs rounding when the law is degenerate (se = 0).
  constexpr double kFloor = 1e-12;
  cmp.u_within = cmp.u_gap <= kComparisonSigmas * cmp.u_se_exact + kFloor;
  cmp.delta_within =
      cmp.delta_gap <= kComparisonSigmas * cmp.delta_se_exact + kFloor;
  cmp.p_within = cmp.p_gap <= kComparisonSigmas * cmp.p_se_exact + kFloor;
  return cmp;
}

}  // namespace welfare_order
