#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "molu/actfn.hpp"
#include "molu/node.hpp"

namespace molu::bench {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitData = 3 };

/// Bad flag or config value; maps to kExitUsage.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input file unreadable or malformed; maps to kExitData.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses the flat config grammar:
///
///   file  := line*
///   line  := blank | comment | entry
///   comment := '#' anything
///   entry := key '=' value        (whitespace around key and value trimmed)
///   key   := [A-Za-z0-9_]+
///
/// Duplicate keys and lines without '=' are errors that name the line.
KeyValues parse_key_values(const std::string& text, const std::string& origin = "<config>");
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

/// Later maps win: merge({&file, &flags}).
KeyValues merge(std::initializer_list<const KeyValues*> layers);

std::vector<ActivationSpec> parse_activation_list(const KeyValues& kv);

struct NodeExperimentConfig {
  std::vector<ActivationSpec> activations{ActivationSpec::molu()};
  node::NodeTrainConfig train;
  node::LvParams lv;
  double extrapolate_to = 0.0;  // 0 disables the extrapolation report
  std::string out = "node.csv";

  /// Settings absent from `kv` keep their built-in defaults.
  static NodeExperimentConfig from(const KeyValues& kv);
  KeyValues to_key_values() const;
};

struct MnistExperimentConfig {
  std::vector<ActivationSpec> activations{ActivationSpec::molu()};
  std::size_t epochs = 50;
  double learning_rate = 0.001;
  double momentum = 0.5;
  std::size_t batch_size = 64;
  std::uint64_t seed = 10;
  std::vector<std::size_t> hidden_dims{128};
  std::string data_dir = "data/mnist";
  std::string out = "mnist.csv";

  /// Absent settings keep built-in defaults; `data_dir` falls back to
  /// $MOLU_DATA_DIR before the built-in path.
  static MnistExperimentConfig from(const KeyValues& kv);
  KeyValues to_key_values() const;
};

inline constexpr const char* kDataDirEnv = "MOLU_DATA_DIR";

}  // namespace molu::bench
