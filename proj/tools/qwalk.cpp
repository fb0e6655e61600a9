#include <cstdio>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "qwalk/errors.hpp"

namespace {

using namespace qwalk;
using namespace qwalk::cli;

int report(const char* kind, const std::exception& e, int code) {
  std::fprintf(stderr, "qwalk: %s: %s\n", kind, e.what());
  return code;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return report("config error", e, kConfigError);
  } catch (const ParseError& e) {
    return report("config error", e, kConfigError);
  } catch (const NotFoundError& e) {
    return report("config error", e, kConfigError);
  } catch (const nlohmann::json::exception& e) {
    return report("config error", e, kConfigError);
  } catch (const std::invalid_argument& e) {
    return report("config error", e, kConfigError);
  } catch (const ToleranceError& e) {
    return report("tolerance failure", e, kToleranceFailure);
  } catch (const CalibrationError& e) {
    return report("tolerance failure", e, kToleranceFailure);
  } catch (const ProtocolError& e) {
    return report("invariant violation", e, kInvariantViolation);
  } catch (const InvariantViolation& e) {
    return report("invariant violation", e, kInvariantViolation);
  } catch (const std::exception& e) {
    return report("invariant violation", e, kInvariantViolation);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum walks on grids, their pairwise-stage decomposition, "
               "and double-well qubit dynamics."};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed = 0;
  const std::map<std::string, std::pair<std::string, int (*)(const Options&)>> commands = {
      {"walk", {"Run a coined walk on a graph and write its position distribution", cmd_walk}},
      {"decompose", {"Decompose a unitary into pairwise rotation stages", cmd_decompose}},
      {"conveyor-verify",
       {"Check the register-conveyor protocol against direct stage application",
        cmd_conveyor_verify}},
      {"tdse", {"Propagate a double-well electron through a barrier timeline", cmd_tdse}},
      {"calibrate", {"Find the hold time that gives a target transfer", cmd_calibrate}},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed for randomized parts (overrides the config)");
    sub->add_flag("--oracle", opt.oracle, "Also run the independent reference and report it");
    subs.emplace_back(sub, entry.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  for (auto [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) opt.seed = seed;
    return guarded([&] { return fn(opt); });
  }
  return kConfigError;
}
