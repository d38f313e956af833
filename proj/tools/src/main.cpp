// welfare_order command-line front end.
//
//   welfare_order <indices|simulate|exact|compare|converge> --config run.json
//       [--out DIR] [--threads K] [--samples M] [--seed S]
//
// Exit codes: 0 success, 2 config error, 3 budget error, 4 runtime error.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "welfare_order/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitRuntime = 4;

unsigned parse_thread_count(const std::string& text, const std::string& origin) {
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || value > 4096) {
    throw welfare_order::ConfigError(origin + ": expected a thread count, got '" +
                                     text + "'");
  }
  return static_cast<unsigned>(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Welfare of weighted two-tier voting rules"};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  app.add_option("command", command,
                 "indices | simulate | exact | compare | converge")
      ->required()
      ->check(CLI::IsMember({"indices", "simulate", "exact", "compare",
                             "converge"}));
  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  auto* threads_opt = app.add_option(
      "--threads", threads,
      "worker threads (speed only; default $WELFARE_ORDER_THREADS or all cores)");
  auto* samples_opt = app.add_option("--samples", samples, "override samples");
  auto* seed_opt = app.add_option("--seed", seed, "override seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    welfare_order::cli::RunConfig config =
        welfare_order::cli::load_config(config_path);
    if (threads_opt->count() > 0) {
      config.run.threads = threads;
    } else if (const char* env = std::getenv("WELFARE_ORDER_THREADS")) {
      config.run.threads = parse_thread_count(env, "WELFARE_ORDER_THREADS");
    }
    if (samples_opt->count() > 0) {
      if (samples == 0) {
        throw welfare_order::ConfigError("--samples: must be >= 1");
      }
      config.run.samples = samples;
    }
    if (seed_opt->count() > 0) config.run.seed = seed;

    const auto out = welfare_order::cli::run_command(command, config);
    welfare_order::cli::write_outputs(out, out_dir);
    std::cout << welfare_order::cli::canonical_dump(out.report);
    return 0;
  } catch (const welfare_order::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const welfare_order::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
