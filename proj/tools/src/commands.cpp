#include "commands.hpp"

#include <cmath>
#include <filesystem>

#include "welfare_order/analytics.hpp"
#include "welfare_order/errors.hpp"
#include "welfare_order/stats.hpp"

namespace welfare_order::cli {
namespace {

constexpr double kIndexTieTolerance = 1e-12;

const Society& require_society(const RunConfig& config) {
  if (!config.society) {
    throw ConfigError(
        "society: this command needs a concrete society (sizes, or pattern/limit "
        "with n)");
  }
  return *config.society;
}

const WeightAllocation& require_allocation(const RunConfig& config) {
  if (config.allocations.empty()) {
    throw ConfigError("allocation: missing required field");
  }
  return config.allocations.front();
}

const MarginDistribution& require_margin(const RunConfig& config) {
  if (!config.margin) throw ConfigError("margin: missing required field");
  return *config.margin;
}

Json profile_json(const AsymptoticProfile& profile) {
  Json j;
  j["rho"] = number(profile.rho);
  j["c"] = number(profile.c_star);
  j["lambda"] = number(profile.lambda);
  j["u_limit"] = number(profile.u_limit);
  j["delta_limit"] = number(profile.delta_limit);
  j["p_limit"] = number(profile.p_limit);
  return j;
}

Json estimates_json(const ObjectiveEstimates& est) {
  Json j;
  j["u_hat"] = number(est.u_hat);
  j["delta_hat"] = number(est.delta_hat);
  j["p_hat"] = number(est.p_hat);
  j["u_se"] = number(est.u_se);
  j["delta_se"] = number(est.delta_se);
  j["p_se"] = number(est.p_se);
  j["mean_abs_s"] = number(est.mean_abs_s);
  return j;
}

// Correlation between margin and rule for the configured model.
double model_rho(const RunConfig& config) {
  if (config.model == ModelKind::kIntensity) {
    return rho_intensity(config.intensity, config.rule);
  }
  return rho(require_margin(config), config.rule);
}

// Index that orders allocations for the configured model.
double ordering_index(const RunConfig& config, const Society& society,
                      const WeightAllocation& alloc) {
  const auto weights = materialize_weights(society, alloc);
  if (config.model == ModelKind::kIndependent) {
    return config.rule.kind() == RepresentationRule::Kind::kProportional
               ? hat_c_sqrt(society.sizes(), weights)
               : sqrt_cosine(society.sizes(), weights);
  }
  return cosine(society.sizes(), weights);
}

const char* ordering_index_name(const RunConfig& config) {
  if (config.model != ModelKind::kIndependent) return "cosine";
  return config.rule.kind() == RepresentationRule::Kind::kProportional
             ? "hat_c_sqrt"
             : "sqrt_cosine";
}

// Large-n value of hat_c_sqrt for sizes drawn from the limit distribution.
double hat_c_sqrt_limit(const LimitDistribution& limit,
                        const WeightAllocation& alloc) {
  const double weight_mean =
      limit.expect([&](double s) { return alloc.weight_for_size(s); });
  const double size_mean = limit.expect([](double s) { return s; });
  const double index = limit.expect([&](double s) {
    const double a = alloc.weight_for_size(s);
    return a * a / s;
  });
  if (!(index > 0.0)) throw ConfigError("allocation: weight law vanishes on the support");
  return std::min(1.0, weight_mean / std::sqrt(size_mean * index));
}

Json run_json(const RunConfig& config, const SimulationResult& result) {
  Json j;
  j["model"] = std::string(to_string(config.model));
  j["description"] = result.welfare.description;
  j["groups"] = result.groups;
  j["samples"] = result.samples;
  j["seed"] = result.seed;
  j["sigma"] = number(result.sigma);
  const Json estimates = estimates_json(result.estimates);
  for (const auto& item : estimates.items()) {
    j[item.key()] = item.value();
  }
  j["tie_count"] = result.tie_count;
  return j;
}

}  // namespace

SimulationResult simulate_model(const RunConfig& config,
                                const WeightAllocation& alloc,
                                const RunOptions& run) {
  const Society& society = require_society(config);
  switch (config.model) {
    case ModelKind::kCorrelated: {
      const SimulationSpec spec{society, alloc, config.rule,
                                require_margin(config), run};
      return simulate(spec);
    }
    case ModelKind::kIntensity:
      return simulate_intensity(config.intensity, society, alloc, config.rule,
                                run);
    case ModelKind::kIndependent: {
      IndepModel model;
      model.sizes.assign(society.sizes().begin(), society.sizes().end());
      model.rule = config.rule;
      model.finite_population_scale = config.finite_population_scale;
      const auto weights = materialize_weights(society, alloc);
      return simulate_indep(model, weights, run);
    }
  }
  throw std::logic_error("unknown model");
}

CommandOutput cmd_indices(const RunConfig& config) {
  Json report;
  report["command"] = "indices";
  report["model"] = std::string(to_string(config.model));
  const WeightAllocation& alloc = require_allocation(config);

  std::optional<double> finite_c, limit_c, finite_c_sqrt, limit_c_sqrt,
      finite_hat, limit_hat;
  if (config.society) {
    const auto weights = materialize_weights(*config.society, alloc);
    const auto sizes = config.society->sizes();
    finite_c = cosine(sizes, weights);
    finite_c_sqrt = sqrt_cosine(sizes, weights);
    finite_hat = hat_c_sqrt(sizes, weights);
    report["groups"] = config.society->group_count();
    report["cosine"] = number(*finite_c);
    report["sqrt_cosine"] = number(*finite_c_sqrt);
    report["hat_c_sqrt"] = number(*finite_hat);
    report["sainte_lague"] = number(sainte_lague(sizes, weights));
  }
  if (config.limit && alloc.is_law()) {
    limit_c = cosine_limit(*config.limit, alloc);
    limit_c_sqrt = sqrt_cosine_limit(*config.limit, alloc);
    limit_hat = hat_c_sqrt_limit(*config.limit, alloc);
    report["cosine_limit"] = number(*limit_c);
    report["sqrt_cosine_limit"] = number(*limit_c_sqrt);
    report["hat_c_sqrt_limit"] = number(*limit_hat);
  }
  if (!finite_c && !limit_c) {
    throw ConfigError(
        "society: indices need a society or a limit distribution with a weight "
        "law");
  }

  // Limits use the large-n index when available.
  const bool use_limit = limit_c.has_value();
  if (config.model == ModelKind::kIndependent) {
    Json j;
    if (config.rule.kind() == RepresentationRule::Kind::kProportional) {
      // Exact at every n, so the finite index wins when a society is given.
      const double c = finite_hat ? *finite_hat : *limit_hat;
      j["c_sqrt"] = number(c);
      j["c_source"] = finite_hat ? "hat_c_sqrt" : "hat_c_sqrt_limit";
      const AsymptoticProfile profile = asymptotic_objectives(1.0, c);
      j["lambda"] = number(profile.lambda);
      j["u_limit"] = number(profile.u_limit);
      j["delta_limit"] = number(profile.delta_limit);
      j["p_limit"] = number(profile.p_limit);
    } else {
      const double c = use_limit ? *limit_c_sqrt : *finite_c_sqrt;
      j["c_sqrt"] = number(c);
      j["c_source"] = use_limit ? "sqrt_cosine_limit" : "sqrt_cosine";
      j["p_limit"] = number(indep_asymptotic_p(std::min(1.0, c)));
    }
    report["asymptotic"] = j;
  } else if (config.margin || config.model == ModelKind::kIntensity) {
    const double c = use_limit ? *limit_c : *finite_c;
    Json j = profile_json(asymptotic_objectives(model_rho(config), c));
    j["c_source"] = use_limit ? "cosine_limit" : "cosine";
    report["asymptotic"] = j;
  }

  CommandOutput out;
  out.report = report;
  out.files.emplace_back("indices.json", canonical_dump(report));
  return out;
}

CommandOutput cmd_simulate(const RunConfig& config) {
  const WeightAllocation& alloc = require_allocation(config);
  RunOptions run = config.run;
  run.keep_order = config.write_samples;
  const SimulationResult result = simulate_model(config, alloc, run);

  Json report;
  report["command"] = "simulate";
  const Json run_fields = run_json(config, result);
  for (const auto& item : run_fields.items()) {
    report[item.key()] = item.value();
  }
  if (config.model != ModelKind::kIndependent) {
    const auto weights = materialize_weights(*config.society, alloc);
    const double c = cosine(config.society->sizes(), weights);
    report["limits"] = profile_json(asymptotic_objectives(model_rho(config), c));
  }

  CommandOutput out;
  out.report = report;
  out.files.emplace_back("summary.json", canonical_dump(report));
  if (config.write_samples && !result.ordered_welfare.empty()) {
    CsvWriter csv({"index", "w", "s_norm"});
    for (std::size_t j = 0; j < result.ordered_welfare.size(); ++j) {
      csv.row({std::to_string(j), csv_number(result.ordered_welfare[j]),
               csv_number(result.ordered_s_norm[j])});
    }
    out.files.emplace_back("samples.csv", csv.text());
  }
  return out;
}

CommandOutput cmd_exact(const RunConfig& config) {
  if (config.model != ModelKind::kCorrelated) {
    throw ConfigError("model: exact enumeration supports the correlated model");
  }
  const ExactDistribution exact =
      exact_welfare(require_society(config), require_allocation(config),
                    config.rule, require_margin(config), config.exact);

  Json report;
  report["command"] = "exact";
  report["mode"] = exact.rational ? "rational" : "float";
  report["profiles"] = exact.profiles;
  report["atoms"] = exact.atoms.size();
  report["sigma"] = number(exact.sigma);
  report["u"] = number(exact.u);
  report["delta"] = number(exact.delta);
  report["p"] = number(exact.p);
  report["total_probability"] = number(exact.total_probability);
  if (exact.rational) {
    Json j;
    j["sigma_squared"] = exact.sigma_squared_exact;
    j["u"] = exact.u_exact;
    j["delta"] = exact.delta_exact;
    j["p"] = exact.p_exact;
    report["exact"] = j;
  }

  CsvWriter csv({"value", "probability", "numerator", "probability_exact"});
  for (const ExactAtom& atom : exact.atoms) {
    csv.row({csv_number(atom.value), csv_number(atom.probability),
             atom.numerator, atom.probability_exact});
  }
  CommandOutput out;
  out.report = report;
  out.files.emplace_back("exact.json", canonical_dump(report));
  out.files.emplace_back("atoms.csv", csv.text());
  return out;
}

CommandOutput cmd_compare(const RunConfig& config) {
  if (config.allocations.size() != 2) {
    throw ConfigError("allocations: compare needs exactly two allocations");
  }
  const Society& society = require_society(config);
  const WeightAllocation& a = config.allocations[0];
  const WeightAllocation& b = config.allocations[1];

  RunOptions run_a = config.run, run_b = config.run;
  run_a.keep_order = run_b.keep_order = false;
  // Independent streams for the two samples, as the two-sample band assumes.
  run_b.seed = derive_seed(config.run.seed, 1);
  const SimulationResult ra = simulate_model(config, a, run_a);
  const SimulationResult rb = simulate_model(config, b, run_b);
  const DominanceResult dom = dominates(ra.welfare, rb.welfare, config.alpha);

  const double index_a = ordering_index(config, society, a);
  const double index_b = ordering_index(config, society, b);
  std::string expected = "incomparable (statistically equal)";
  if (index_a > index_b + kIndexTieTolerance) expected = "dominates";
  if (index_b > index_a + kIndexTieTolerance) expected = "dominated";
  std::string verdict(to_string(dom.verdict));
  if (dom.statistically_equal) verdict = "incomparable (statistically equal)";

  Json report;
  report["command"] = "compare";
  report["model"] = std::string(to_string(config.model));
  report["index"] = ordering_index_name(config);
  report["index_a"] = number(index_a);
  report["index_b"] = number(index_b);
  report["verdict"] = verdict;
  report["expected"] = expected;
  report["agreement"] = verdict == expected;
  report["alpha"] = number(config.alpha);
  report["slack"] = number(dom.slack);
  report["excess_ab"] = number(dom.excess_ab);
  report["excess_ba"] = number(dom.excess_ba);
  report["a"] = run_json(config, ra);
  report["b"] = run_json(config, rb);

  CommandOutput out;
  out.report = report;
  out.files.emplace_back("compare.json", canonical_dump(report));
  return out;
}

CommandOutput cmd_converge(const RunConfig& config) {
  if (config.model != ModelKind::kCorrelated) {
    throw ConfigError("model: converge supports the correlated model");
  }
  if (config.n_values.empty()) {
    throw ConfigError("n_values: need at least one n");
  }
  const WeightAllocation& alloc = require_allocation(config);
  SocietyGenerator generator;
  std::vector<double> seed_sizes;
  if (config.pattern) {
    generator = *config.pattern;
    seed_sizes = config.pattern->sizes;
  } else if (config.limit) {
    generator = LimitSizes{*config.limit, config.society_seed};
    seed_sizes.assign(config.limit->support().begin(),
                      config.limit->support().end());
  } else {
    throw ConfigError("society: converge needs a pattern or a limit distribution");
  }
  RunOptions run = config.run;
  run.keep_order = false;
  const SimulationSpec base{Society(seed_sizes), alloc, config.rule,
                            require_margin(config), run};
  const auto rows = convergence_sweep(base, config.n_values, generator);

  CsvWriter csv({"n", "cosine", "lambda", "u_hat", "u_limit", "u_gap",
                 "delta_hat", "delta_limit", "delta_gap", "p_hat", "p_limit",
                 "p_gap", "ks", "tie_count"});
  Json table = Json::array();
  for (const ConvergenceRow& row : rows) {
    csv.row({std::to_string(row.n), csv_number(row.cosine),
             csv_number(row.limits.lambda), csv_number(row.estimates.u_hat),
             csv_number(row.limits.u_limit), csv_number(row.u_gap),
             csv_number(row.estimates.delta_hat),
             csv_number(row.limits.delta_limit), csv_number(row.delta_gap),
             csv_number(row.estimates.p_hat), csv_number(row.limits.p_limit),
             csv_number(row.p_gap), csv_number(row.ks),
             std::to_string(row.tie_count)});
    Json j;
    j["n"] = row.n;
    j["u_gap"] = number(row.u_gap);
    j["delta_gap"] = number(row.delta_gap);
    j["p_gap"] = number(row.p_gap);
    j["ks"] = number(row.ks);
    table.push_back(j);
  }
  Json report;
  report["command"] = "converge";
  report["samples"] = config.run.samples;
  report["seed"] = config.run.seed;
  report["rows"] = table;

  CommandOutput out;
  out.report = report;
  out.files.emplace_back("converge.csv", csv.text());
  return out;
}

CommandOutput run_command(const std::string& name, const RunConfig& config) {
  if (name == "indices") return cmd_indices(config);
  if (name == "simulate") return cmd_simulate(config);
  if (name == "exact") return cmd_exact(config);
  if (name == "compare") return cmd_compare(config);
  if (name == "converge") return cmd_converge(config);
  throw ConfigError("unknown command '" + name +
                    "' (expected indices, simulate, exact, compare or converge)");
}

void write_outputs(const CommandOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : out.files) {
    write_file((std::filesystem::path(dir) / name).string(), contents);
  }
}

}  // namespace welfare_order::cli
