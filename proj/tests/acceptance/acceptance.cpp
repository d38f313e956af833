// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Every tolerance, sample size and seed is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "welfare_order/analytics.hpp"
#include "welfare_order/engine.hpp"
#include "welfare_order/extensions.hpp"
#include "welfare_order/oracle.hpp"
#include "welfare_order/quadrature.hpp"
#include "welfare_order/stats.hpp"

#ifndef WELFARE_ORDER_CLI_PATH
#error "WELFARE_ORDER_CLI_PATH must point at the welfare_order executable"
#endif

namespace wo = welfare_order;

namespace {

// Criterion 1
constexpr int kOracleSpecs = 20;
constexpr std::uint64_t kOracleSamples = 1'000'000;
constexpr double kOracleSigmas = 4.0;
constexpr double kOracleSeconds = 120.0;
static_assert(kOracleSigmas == wo::kComparisonSigmas);
// Criterion 3
constexpr std::size_t kLimitGroups = 1001;
constexpr std::uint64_t kLimitSamples = 1'000'000;
constexpr double kLimitTolerance = 0.01;
constexpr double kLimitSeconds = 300.0;
// Criterion 4
constexpr std::size_t kSkewGroups = 1000;
constexpr std::uint64_t kSkewSamples = 100'000;
constexpr double kSkewKs = 0.02;
// Criterion 5
constexpr std::size_t kIndepGroups = 10;
constexpr std::uint64_t kIndepSamples = 1'000'000;
constexpr double kIndepKs = 0.005;
// Criterion 6
constexpr std::size_t kDominanceGroups = 500;
constexpr std::uint64_t kDominanceSamples = 100'000;
constexpr double kDominanceAlpha = 0.01;
// Criterion 7
constexpr double kIdentityTolerance = 1e-10;
constexpr double kDeltaIdentityTolerance = 1e-14;
// Criterion 8
constexpr int kSainteLaguePairs = 100;
constexpr double kIndexTieTolerance = 1e-12;
// Criterion 9
constexpr std::uint64_t kDeterminismSamples = 50'000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a = 0, double b = 0, double c = 0,
                double d = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, a, b, c, d);
  return buffer;
}

Outcome oracle_agreement() {
  const auto start = Clock::now();
  std::mt19937_64 gen(20240611);
  std::uniform_int_distribution<int> group_count(2, 6), size(1, 9), weight(0, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // The random step rule: two jumps in (0, 1], increasing values.
  std::vector<double> breaks{0.2 + 0.5 * unit(gen), 0.0};
  breaks[1] = breaks[0] + (1.0 - breaks[0]) * unit(gen);
  const double v0 = 0.1 + 0.4 * unit(gen);
  const auto step = wo::RepresentationRule::step(breaks, {v0, 1.0});

  int agreed = 0;
  double worst = 0.0;
  for (int k = 0; k < kOracleSpecs; ++k) {
    const int n = group_count(gen);
    std::vector<double> sizes(n), weights(n);
    do {
      for (int i = 0; i < n; ++i) {
        sizes[i] = size(gen);
        weights[i] = weight(gen);
      }
    } while (std::all_of(weights.begin(), weights.end(),
                         [](double w) { return w == 0.0; }));
    wo::RunOptions run;
    run.samples = kOracleSamples;
    run.seed = 1000 + static_cast<std::uint64_t>(k);
    const wo::SimulationSpec spec{
        wo::Society(sizes), wo::WeightAllocation::explicit_weights(weights),
        k % 2 == 0 ? wo::RepresentationRule::winner_take_all() : step,
        wo::MarginDistribution::rademacher(), run};
    const auto cmp = wo::exact_vs_simulation(spec);
    if (cmp.all_within()) ++agreed;
    auto ratio = [](double gap, double se) { return se > 0 ? gap / se : 0.0; };
    worst = std::max({worst, ratio(cmp.u_gap, cmp.u_se_exact),
                      ratio(cmp.delta_gap, cmp.delta_se_exact),
                      ratio(cmp.p_gap, cmp.p_se_exact)});
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = agreed == kOracleSpecs && elapsed < kOracleSeconds;
  out.detail = fmt("%.0f/%.0f specs within 4 se (worst %.2f se), %.1f s",
                   agreed, kOracleSpecs, worst, elapsed);
  return out;
}

Outcome hand_instance() {
  const wo::Society society({5, 2, 2});
  const auto alloc = wo::WeightAllocation::explicit_weights({1, 1, 1});
  wo::ExactOptions options;
  options.mode = wo::ExactMode::kRational;
  const auto exact =
      wo::exact_welfare(society, alloc, wo::RepresentationRule::winner_take_all(),
                        wo::MarginDistribution::rademacher(), options);

  // Independent recount of the 8 profiles.
  const double sigma = std::sqrt(33.0);
  double u = 0, delta = 0, p = 0;
  for (int mask = 0; mask < 8; ++mask) {
    const int x[3] = {mask & 1 ? 1 : -1, mask & 2 ? 1 : -1, mask & 4 ? 1 : -1};
    const int s = 5 * x[0] + 2 * x[1] + 2 * x[2];
    const int t = x[0] + x[1] + x[2];
    const double w = (t > 0 ? s : -s) / sigma;
    u += w / 8;
    delta += std::max(-w, 0.0) / 8;
    p += w < 0 ? 1.0 / 8 : 0.0;
  }
  const bool recount = p == 0.25 && std::abs(u - 4.5 / sigma) < 1e-15 &&
                       std::abs(delta - 1.0 / (4.0 * sigma)) < 1e-15;
  const bool rational = exact.rational && exact.p_exact == "1/4" &&
                        exact.u_exact == "(9/2)/sqrt(33)" &&
                        exact.delta_exact == "(1/4)/sqrt(33)";
  Outcome out;
  out.pass = recount && rational;
  out.detail = "p = " + exact.p_exact + ", u = " + exact.u_exact +
               ", delta = " + exact.delta_exact +
               (recount ? "; recount agrees" : "; recount DISAGREES");
  return out;
}

wo::SimulationSpec equal_uniform_spec(std::size_t n, std::uint64_t samples,
                                      std::uint64_t seed) {
  wo::RunOptions run;
  run.samples = samples;
  run.seed = seed;
  return {wo::Society(std::vector<double>(n, 1.0)),
          wo::WeightAllocation::explicit_weights(std::vector<double>(n, 1.0)),
          wo::RepresentationRule::winner_take_all(),
          wo::MarginDistribution::uniform(), run};
}

Outcome corollary_limits() {
  const auto start = Clock::now();
  const auto result =
      wo::simulate(equal_uniform_spec(kLimitGroups, kLimitSamples, 31));
  const double x = std::sqrt(3.0) / 2.0;
  const double u = std::sqrt(2.0 / std::numbers::pi) * x;
  const double delta = (1.0 - x) / std::sqrt(2.0 * std::numbers::pi);
  const double p = 1.0 / 6.0;
  const auto& e = result.estimates;
  const double gu = std::abs(e.u_hat - u), gd = std::abs(e.delta_hat - delta),
               gp = std::abs(e.p_hat - p);
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = gu < kLimitTolerance && gd < kLimitTolerance &&
             gp < kLimitTolerance && elapsed < kLimitSeconds;
  out.detail = fmt("gaps u %.4f, delta %.4f, p %.4f; %.1f s", gu, gd, gp,
                   elapsed);
  return out;
}

Outcome skew_normal_fit() {
  const auto result = wo::simulate(equal_uniform_spec(kSkewGroups, kSkewSamples, 41));
  const auto profile = wo::asymptotic_objectives(std::sqrt(3.0) / 2.0, 1.0);
  const double ks = wo::ks_distance(result.welfare, wo::SkewNormal{profile.lambda});
  Outcome out;
  out.pass = ks < kSkewKs;
  out.detail = fmt("KS %.5f against SN(%.4f)", ks, profile.lambda);
  return out;
}

Outcome independent_exact_law() {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> draw(0.5, 10.0);
  wo::IndepModel model;
  model.rule = wo::RepresentationRule::proportional();
  std::vector<double> weights;
  for (std::size_t i = 0; i < kIndepGroups; ++i) {
    model.sizes.push_back(draw(gen));
    weights.push_back(draw(gen));
  }
  wo::RunOptions run;
  run.samples = kIndepSamples;
  run.seed = 51;
  const auto result = wo::simulate_indep(model, weights, run);
  const double c = wo::hat_c_sqrt(model.sizes, weights);
  const double lambda = c / std::sqrt(1.0 - c * c);
  const double ks = wo::ks_distance(result.welfare, wo::SkewNormal{lambda});
  Outcome out;
  out.pass = ks < kIndepKs;
  out.detail = fmt("KS %.5f against SN(%.4f), c = %.4f", ks, lambda, c);
  return out;
}

Outcome dominance_order() {
  const wo::LimitDistribution limit({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto society = wo::Society::draw_from(limit, kDominanceGroups, 61);
  const std::vector<std::pair<std::string, wo::WeightAllocation>> allocs{
      {"proportional", wo::WeightAllocation::from_law(wo::SizeLaw::proportional())},
      {"constant", wo::WeightAllocation::from_law(wo::SizeLaw::constant())},
      {"cubic", wo::WeightAllocation::from_law(wo::SizeLaw::power(3.0))}};

  std::vector<double> cosines;
  std::vector<wo::SimulationResult> results;
  for (std::size_t k = 0; k < allocs.size(); ++k) {
    wo::RunOptions run;
    run.samples = kDominanceSamples;
    run.seed = wo::derive_seed(62, k);
    const wo::SimulationSpec spec{society, allocs[k].second,
                                  wo::RepresentationRule::winner_take_all(),
                                  wo::MarginDistribution::rademacher(), run};
    results.push_back(wo::simulate(spec));
    cosines.push_back(wo::cosine(
        society.sizes(), wo::materialize_weights(society, allocs[k].second)));
  }
  int agreed = 0;
  std::string detail;
  for (std::size_t a = 0; a < allocs.size(); ++a) {
    for (std::size_t b = a + 1; b < allocs.size(); ++b) {
      const auto dom = wo::dominates(results[a].welfare, results[b].welfare,
                                     kDominanceAlpha);
      const auto expected = cosines[a] > cosines[b] ? wo::Dominance::kDominates
                                                    : wo::Dominance::kDominated;
      const bool ok = dom.verdict == expected;
      agreed += ok;
      std::string verdict(wo::to_string(dom.verdict));
      if (dom.statistically_equal) verdict += " (statistically equal)";
      detail += (detail.empty() ? "" : "; ") + allocs[a].first + " vs " +
                allocs[b].first + " " + verdict +
                fmt(" (c %.4f vs %.4f, sup gap %.4f, slack %.4f)", cosines[a],
                    cosines[b], std::max(dom.excess_ab, dom.excess_ba),
                    dom.slack);
    }
  }
  Outcome out;
  out.pass = agreed == 3;
  out.detail = fmt("%.0f/3 pairs agree: ", agreed) + detail;
  return out;
}

Outcome analytic_identities() {
  double worst_mean = 0, worst_h0 = 0, worst_delta = 0;
  for (double lambda : {0.0, 0.5, -0.5, 2.0, -2.0, 10.0, -10.0}) {
    const wo::SkewNormal sn{lambda};
    std::vector<double> cuts{0.0};
    if (lambda != 0.0) {
      for (double k : {0.25, 1.0, 4.0}) cuts.push_back(k / std::abs(lambda));
      for (double k : {0.25, 1.0, 4.0}) cuts.push_back(-k / std::abs(lambda));
    }
    std::sort(cuts.begin(), cuts.end());
    const double numeric = wo::quadrature(
        [&](double x) { return x * wo::sn_pdf(sn, x); }, -40.0, 40.0, 1e-13,
        cuts);
    worst_mean = std::max(worst_mean, std::abs(numeric - wo::sn_mean(sn)));
    if (lambda > 0) {
      const double h0 = std::atan(1.0 / lambda) / std::numbers::pi;
      worst_h0 = std::max(worst_h0, std::abs(wo::sn_cdf(sn, 0.0) - h0));
    }
  }
  for (int j = 0; j <= 200; ++j) {
    const double x = j / 200.0;
    const auto profile = wo::asymptotic_objectives(1.0, x);
    const double identity =
        (std::sqrt(2.0 / std::numbers::pi) - profile.u_limit) / 2.0;
    worst_delta = std::max(worst_delta, std::abs(profile.delta_limit - identity));
  }
  Outcome out;
  out.pass = worst_mean < kIdentityTolerance && worst_h0 < kIdentityTolerance &&
             worst_delta < kDeltaIdentityTolerance;
  out.detail = fmt("max errors: mean %.2e, H(0) %.2e, delta %.2e", worst_mean,
                   worst_h0, worst_delta);
  return out;
}

Outcome sainte_lague_equivalence() {
  std::mt19937_64 gen(81);
  std::uniform_real_distribution<double> size(1.0, 20.0), weight(0.0, 10.0);
  std::vector<double> sizes(25);
  for (double& s : sizes) s = size(gen);
  int agreed = 0;
  for (int k = 0; k < kSainteLaguePairs; ++k) {
    std::vector<double> a(sizes.size()), b(sizes.size());
    for (double& w : a) w = weight(gen);
    if (k % 10 == 0) {
      b = a;  // exact ties
    } else {
      for (double& w : b) w = weight(gen);
    }
    const double total_a = std::accumulate(a.begin(), a.end(), 0.0);
    const double total_b = std::accumulate(b.begin(), b.end(), 0.0);
    for (double& w : b) w *= total_a / total_b;

    const double dc = wo::hat_c_sqrt(sizes, a) - wo::hat_c_sqrt(sizes, b);
    const double dsl = wo::sainte_lague(sizes, a) - wo::sainte_lague(sizes, b);
    const bool tie_c = std::abs(dc) <= kIndexTieTolerance;
    const bool tie_sl = std::abs(dsl) <= kIndexTieTolerance * std::abs(
        wo::sainte_lague(sizes, a));
    bool ok;
    if (tie_c || tie_sl) {
      ok = tie_c && tie_sl;
    } else {
      ok = (dc > 0) == (dsl < 0);
    }
    agreed += ok;
  }
  Outcome out;
  out.pass = agreed == kSainteLaguePairs;
  out.detail = fmt("%.0f/%.0f pairs ordinally inverse", agreed, kSainteLaguePairs);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome thread_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("welfare_order_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path config = dir / "run.json";
  {
    std::ofstream out(config);
    out << R"({"society": {"pattern": [1, 2, 3, 5], "n": 60},
 "allocation": {"law": "power", "gamma": 0.5},
 "rule": {"kind": "step", "breakpoints": [0.1, 0.4], "values": [0.5, 1]},
 "margin": {"kind": "symmetric-beta", "shape": 2},
 "samples": )" << kDeterminismSamples
        << R"(, "seed": 91, "chunk_size": 4096})";
  }
  auto run = [&](int threads) {
    const fs::path out = dir / ("t" + std::to_string(threads));
    const std::string command = std::string("\"") + WELFARE_ORDER_CLI_PATH +
                                "\" simulate --config \"" + config.string() +
                                "\" --out \"" + out.string() + "\" --threads " +
                                std::to_string(threads) + " > /dev/null";
    const int status = std::system(command.c_str());
    return std::make_pair(status, read_file(out / "samples.csv"));
  };
  const auto [status1, csv1] = run(1);
  const auto [status8, csv8] = run(8);
  fs::remove_all(dir);
  Outcome out;
  out.pass = status1 == 0 && status8 == 0 && !csv1.empty() && csv1 == csv8;
  out.detail = fmt("exit codes %.0f/%.0f, %.0f bytes each, identical: ",
                   status1, status8, static_cast<double>(csv1.size())) +
               (csv1 == csv8 ? "yes" : "no");
  return out;
}

Outcome identity_reduction() {
  const wo::Society society({4, 1, 7, 2, 2, 9, 3});
  const auto alloc = wo::WeightAllocation::explicit_weights({3, 1, 5, 2, 1, 4, 2});
  const auto rule = wo::RepresentationRule::step({0.25, 0.6}, {0.3, 1.0});
  wo::RunOptions run;
  run.samples = 20000;
  run.seed = 101;
  run.keep_order = true;
  const auto correlated = wo::simulate(
      {society, alloc, rule, wo::MarginDistribution::uniform(), run});
  wo::IntensityModel model;
  model.theta = wo::MarginDistribution::uniform();
  model.epsilon = wo::EpsilonDistribution::uniform(1.0);
  const auto intensity = wo::simulate_intensity(model, society, alloc, rule, run);
  const auto& a = correlated.ordered_welfare;
  const auto& b = intensity.ordered_welfare;
  const bool same = a.size() == b.size() && !a.empty() &&
                    std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  Outcome out;
  out.pass = same;
  out.detail = fmt("%.0f samples, bitwise identical: ", static_cast<double>(a.size())) +
               (same ? "yes" : "no");
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle agreement", oracle_agreement},
      {"hand-derived instance", hand_instance},
      {"limits of u, delta, p", corollary_limits},
      {"skew-normal fit", skew_normal_fit},
      {"independent model exact law", independent_exact_law},
      {"dominance follows cosine order", dominance_order},
      {"analytic identities", analytic_identities},
      {"Sainte-Lague ordinal equivalence", sainte_lague_equivalence},
      {"thread-count determinism", thread_determinism},
      {"identity reduction", identity_reduction},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("threw: ") + e.what();
    }
    failures += !outcome.pass;
    std::printf("criterion %2zu %s  %s: %s\n", k + 1,
                outcome.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
