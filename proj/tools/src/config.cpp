#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "welfare_order/errors.hpp"

namespace welfare_order::cli {
namespace {

using nlohmann::json;

// A JSON value plus its path in the document, for error messages.
class Node {
 public:
  Node(const json& value, std::string path)
      : value_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *value_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(path_ + ": " + message);
  }

  bool is_object() const { return value_->is_object(); }
  bool is_string() const { return value_->is_string(); }

  bool has(const std::string& key) const {
    return value_->is_object() && value_->contains(key);
  }
  Node at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    const auto it = value_->find(key);
    if (it == value_->end()) {
      throw ConfigError(child_path(key) + ": missing required field");
    }
    return Node(*it, child_path(key));
  }
  std::optional<Node> find(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
  }

  void expect_keys(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (const auto& item : value_->items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) ==
          allowed.end()) {
        throw ConfigError(child_path(item.key()) + ": unknown field");
      }
    }
  }

  double number() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
  }
  std::uint64_t count() const {
    if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
    if (value_->is_number_integer()) {
      if (value_->get<std::int64_t>() < 0) fail("must be >= 0");
      return static_cast<std::uint64_t>(value_->get<std::int64_t>());
    }
    if (value_->is_number_float()) {
      const double x = value_->get<double>();
      if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) {
        return static_cast<std::uint64_t>(x);
      }
    }
    fail("expected a nonnegative integer");
  }
  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }
  std::string text() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }
  std::vector<double> numbers() const {
    if (!value_->is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t j = 0; j < value_->size(); ++j) {
      out.push_back(Node((*value_)[j], path_ + "[" + std::to_string(j) + "]")
                        .number());
    }
    return out;
  }
  std::vector<Node> elements() const {
    if (!value_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t j = 0; j < value_->size(); ++j) {
      out.emplace_back((*value_)[j], path_ + "[" + std::to_string(j) + "]");
    }
    return out;
  }

  // Runs fn, prefixing any ConfigError without a path with this node's path.
  template <class Fn>
  auto guard(Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind(path_, 0) == 0) throw;
      throw ConfigError(path_ + ": " + what);
    }
  }

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* value_;
  std::string path_;
};

ModelKind parse_model(const Node& node) {
  const std::string name = node.text();
  if (name == "correlated") return ModelKind::kCorrelated;
  if (name == "intensity") return ModelKind::kIntensity;
  if (name == "independent") return ModelKind::kIndependent;
  node.fail("unknown model '" + name +
            "' (expected correlated, intensity or independent)");
}

RepresentationRule parse_rule(const Node& node) {
  std::string kind;
  if (node.is_string()) {
    kind = node.text();
  } else {
    node.expect_keys({"kind", "breakpoints", "values"});
    kind = node.at("kind").text();
  }
  if (kind == "winner-take-all" || kind == "wta") {
    return RepresentationRule::winner_take_all();
  }
  if (kind == "proportional" || kind == "pr") {
    return RepresentationRule::proportional();
  }
  if (kind == "step") {
    if (node.is_string()) node.fail("a step rule needs breakpoints and values");
    RepresentationRule rule = RepresentationRule::step(
        node.at("breakpoints").numbers(), node.at("values").numbers());
    const auto violations = validate_rule(rule);
    if (!violations.empty()) node.fail(violations.front().message);
    return rule;
  }
  node.fail("unknown rule '" + kind +
            "' (expected winner-take-all, proportional or step)");
}

MarginDistribution parse_margin(const Node& node, bool allow_scale = false) {
  std::string kind;
  if (node.is_string()) {
    kind = node.text();
  } else {
    if (allow_scale) {
      node.expect_keys({"kind", "shape", "points", "probabilities", "scale"});
    } else {
      node.expect_keys({"kind", "shape", "points", "probabilities"});
    }
    kind = node.at("kind").text();
  }
  return node.guard([&] {
    if (kind == "rademacher") return MarginDistribution::rademacher();
    if (kind == "uniform") return MarginDistribution::uniform();
    if (kind == "symmetric-beta") {
      if (node.is_string()) node.fail("symmetric-beta needs a shape");
      return MarginDistribution::symmetric_beta(node.at("shape").number());
    }
    if (kind == "discrete") {
      if (node.is_string()) node.fail("discrete needs points and probabilities");
      return MarginDistribution::discrete_symmetric(
          node.at("points").numbers(), node.at("probabilities").numbers());
    }
    node.fail("unknown margin '" + kind +
              "' (expected rademacher, uniform, symmetric-beta or discrete)");
  });
}

EpsilonDistribution parse_epsilon(const Node& node) {
  node.expect_keys({"kind", "scale", "shape", "points", "cdf"});
  const std::string kind = node.at("kind").text();
  const double scale = node.has("scale") ? node.at("scale").number() : 1.0;
  return node.guard([&] {
    if (kind == "uniform") return EpsilonDistribution::uniform(scale);
    if (kind == "symmetric-beta") {
      return EpsilonDistribution::symmetric_beta(node.at("shape").number(),
                                                 scale);
    }
    if (kind == "table") {
      return EpsilonDistribution::table(node.at("points").numbers(),
                                        node.at("cdf").numbers());
    }
    node.fail("unknown epsilon '" + kind +
              "' (expected uniform, symmetric-beta or table)");
  });
}

SizeLaw parse_law(const Node& node, const Node& parent) {
  const std::string kind = node.text();
  return parent.guard([&] {
    if (kind == "proportional") return SizeLaw::proportional();
    if (kind == "constant") return SizeLaw::constant();
    if (kind == "power") return SizeLaw::power(parent.at("gamma").number());
    if (kind == "table") {
      return SizeLaw::table(parent.at("breakpoints").numbers(),
                            parent.at("values").numbers());
    }
    node.fail("unknown law '" + kind +
              "' (expected proportional, constant, power or table)");
  });
}

std::optional<double> optional_number(const Node& node, const std::string& key) {
  if (!node.has(key)) return std::nullopt;
  return node.at(key).number();
}

// Explicit weights matching a size pattern are repeated with the pattern.
WeightAllocation parse_allocation(const Node& node, const RunConfig& config) {
  node.expect_keys(
      {"weights", "law", "gamma", "breakpoints", "values", "weight_bound"});
  const auto bound = optional_number(node, "weight_bound");
  if (node.has("weights") == node.has("law")) {
    node.fail("give exactly one of 'weights' or 'law'");
  }
  if (node.has("law")) {
    const SizeLaw law = parse_law(node.at("law"), node);
    return node.guard([&] { return WeightAllocation::from_law(law, bound); });
  }
  std::vector<double> weights = node.at("weights").numbers();
  if (config.pattern && config.society &&
      weights.size() == config.pattern->sizes.size() &&
      weights.size() != config.society->group_count()) {
    std::vector<double> repeated(config.society->group_count());
    for (std::size_t i = 0; i < repeated.size(); ++i) {
      repeated[i] = weights[i % weights.size()];
    }
    weights = std::move(repeated);
  }
  auto alloc = node.guard(
      [&] { return WeightAllocation::explicit_weights(weights, bound); });
  if (config.society) {
    node.guard([&] { return materialize_weights(*config.society, alloc); });
  }
  return alloc;
}

void parse_society(const Node& node, RunConfig& config) {
  node.expect_keys({"sizes", "pattern", "limit", "n", "seed", "size_bound"});
  const int sources = static_cast<int>(node.has("sizes")) +
                      static_cast<int>(node.has("pattern")) +
                      static_cast<int>(node.has("limit"));
  if (sources != 1) node.fail("give exactly one of 'sizes', 'pattern' or 'limit'");
  const auto bound = optional_number(node, "size_bound");
  std::optional<std::size_t> n;
  if (node.has("n")) {
    n = static_cast<std::size_t>(node.at("n").count());
    if (*n == 0) node.at("n").fail("must be >= 1");
  }

  if (node.has("sizes")) {
    if (n) node.at("n").fail("'n' only applies to pattern or limit societies");
    auto sizes = node.at("sizes").numbers();
    config.society = node.guard([&] { return Society(std::move(sizes), bound); });
    return;
  }
  if (node.has("pattern")) {
    const Node pattern_node = node.at("pattern");
    PatternSizes pattern{pattern_node.numbers(), {}};
    if (pattern.sizes.empty()) pattern_node.fail("pattern is empty");
    node.guard([&] { return Society(pattern.sizes); });
    config.pattern = pattern;
    if (n) {
      Society repeated = Society::repeat_pattern(pattern.sizes, *n);
      config.society = node.guard([&] {
        return Society(std::vector<double>(repeated.sizes().begin(),
                                           repeated.sizes().end()),
                       bound);
      });
    }
    return;
  }
  const Node limit_node = node.at("limit");
  limit_node.expect_keys({"support", "probabilities"});
  config.limit = limit_node.guard([&] {
    return LimitDistribution(limit_node.at("support").numbers(),
                             limit_node.at("probabilities").numbers());
  });
  config.society_seed =
      node.has("seed") ? node.at("seed").count() : config.run.seed;
  if (n) {
    config.society = Society::draw_from(*config.limit, *n, config.society_seed);
  }
}

ExactMode parse_exact_mode(const Node& node) {
  const std::string mode = node.text();
  if (mode == "auto") return ExactMode::kAuto;
  if (mode == "rational") return ExactMode::kRational;
  if (mode == "float") return ExactMode::kFloat;
  node.fail("unknown exact_mode '" + mode + "' (expected auto, rational or float)");
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t j = 0; j < std::min(byte, text.size()); ++j) {
    if (text[j] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError("config is not valid JSON at " + location(text, byte));
  }
  const Node root(document, "");
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");
  root.expect_keys({"model", "society", "allocation", "allocations", "rule",
                    "margin", "theta", "epsilon", "finite_population_scale",
                    "samples", "seed", "chunk_size", "sample_cap",
                    "antithetic", "write_samples", "alpha", "n_values",
                    "budget", "exact_mode"});

  RunConfig config;
  if (auto node = root.find("model")) config.model = parse_model(*node);
  if (auto node = root.find("samples")) {
    config.run.samples = node->count();
    if (config.run.samples == 0) node->fail("must be >= 1");
  }
  if (auto node = root.find("seed")) config.run.seed = node->count();
  if (auto node = root.find("chunk_size")) {
    config.run.chunk_size = node->count();
    if (config.run.chunk_size == 0) node->fail("must be >= 1");
  }
  if (auto node = root.find("sample_cap")) config.run.sample_cap = node->count();
  if (auto node = root.find("antithetic")) config.run.antithetic = node->boolean();
  if (auto node = root.find("write_samples")) {
    config.write_samples = node->boolean();
  }

  if (auto node = root.find("society")) parse_society(*node, config);

  if (root.has("allocation") && root.has("allocations")) {
    root.fail("give either 'allocation' or 'allocations', not both");
  }
  if (auto node = root.find("allocation")) {
    config.allocations.push_back(parse_allocation(*node, config));
  }
  if (auto node = root.find("allocations")) {
    for (const Node& item : node->elements()) {
      config.allocations.push_back(parse_allocation(item, config));
    }
  }
  // Weight patterns ride along with size patterns for convergence sweeps.
  if (config.pattern && root.has("allocation")) {
    const Node alloc = root.at("allocation");
    if (alloc.has("weights")) {
      auto weights = alloc.at("weights").numbers();
      if (weights.size() == config.pattern->sizes.size()) {
        config.pattern->weights = std::move(weights);
      }
    }
  }

  if (auto node = root.find("rule")) config.rule = parse_rule(*node);
  if (auto node = root.find("margin")) config.margin = parse_margin(*node);
  if (auto node = root.find("theta")) {
    config.intensity.theta = parse_margin(*node, true);
    if (node->has("scale")) {
      config.intensity.theta_scale = node->at("scale").number();
    }
    node->guard([&] {
      validate_intensity(config.intensity);
      return 0;
    });
  }
  if (auto node = root.find("epsilon")) {
    config.intensity.epsilon = parse_epsilon(*node);
  }
  if (auto node = root.find("finite_population_scale")) {
    config.finite_population_scale = node->number();
    if (!(*config.finite_population_scale > 0.0)) node->fail("must be > 0");
  }

  if (auto node = root.find("alpha")) {
    config.alpha = node->number();
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
      node->fail("must lie in (0, 1)");
    }
  }
  if (auto node = root.find("n_values")) {
    for (const Node& item : node->elements()) {
      const auto n = static_cast<std::size_t>(item.count());
      if (n == 0) item.fail("must be >= 1");
      config.n_values.push_back(n);
    }
  }
  if (auto node = root.find("budget")) {
    config.exact.budget = node->number();
    if (!(config.exact.budget > 0.0)) node->fail("must be > 0");
  }
  if (auto node = root.find("exact_mode")) {
    config.exact.mode = parse_exact_mode(*node);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace welfare_order::cli
