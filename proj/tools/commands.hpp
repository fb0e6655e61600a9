#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace qwalk::cli {

struct Options {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  bool oracle = false;
};

// Exit codes.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInvariantViolation = 3;
constexpr int kToleranceFailure = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Each returns an exit code; reports are written before a tolerance failure
// is signalled so the numbers can be inspected.
int cmd_walk(const Options& opt);
int cmd_decompose(const Options& opt);
int cmd_conveyor_verify(const Options& opt);
int cmd_tdse(const Options& opt);
int cmd_calibrate(const Options& opt);

}  // namespace qwalk::cli
