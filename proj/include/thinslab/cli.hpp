#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thinslab/core.hpp"
#include "thinslab/harmonic.hpp"
#include "thinslab/solver.hpp"

namespace thinslab::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEnvPrefix = "LCSLAB_";

enum ExitCode : int { ok = 0, config_error = 1, not_converged = 2, sweep_failure = 3 };

/// Malformed or invalid configuration; `where()` is "source:line:column"
/// (or the variable / flag name for overrides).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ConfigEntry {
  std::string value;
  std::string source;  // file name, env variable or "command line"
  int line = 0;        // 0 for overrides
  int column = 0;
  std::string location() const;
};

/// Flat "section.key" -> value map built from INI-style text:
///   [section]
///   key = value   # comment
/// Later sets override earlier ones.
class ConfigMap {
 public:
  static ConfigMap parse(std::string_view text, const std::string& source = "<config>");
  static ConfigMap load(const std::string& path);

  /// Applies PREFIX_SECTION__KEY=value variables from the environment.
  void apply_env(const char* const* envp, std::string_view prefix = kEnvPrefix);
  /// "section.key=value" as given on the command line.
  void apply_assignment(const std::string& text, const std::string& source = "command line");
  void set(const std::string& key, const std::string& value, const std::string& source);

  const ConfigEntry* find(const std::string& key) const;
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

enum class Experiment { minimize, sweep, renormalized, core, analyze };
std::string to_string(Experiment e);

struct RunConfig {
  Experiment experiment = Experiment::minimize;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  DomainShape shape = DomainShape::disk(1.0);
  int nx = 128;
  int ny = 128;
  int layers = 8;

  std::string boundary_kind = "power";  // power | constant
  int degree = 1;
  double phase = 0.0;

  double eps = 0.05;
  double k = 0.70710678118654752;
  std::optional<double> eta;  // explicit eta overrides k * eps
  std::vector<double> eps_list{0.2, 0.1, 0.05};

  SolveOptions solve;
  DefectOptions defects;

  bool sweep_warm_start = true;
  bool sweep_compare = true;

  PatternSearchOptions pattern;
  int landscape_scan = 0;

  double core_eps = 0.05;
  std::vector<double> core_sigma_over_eps{4.0, 8.0, 16.0, 32.0};
  CoreResolution core_resolution;

  std::string analyze_input;
  std::optional<double> c_star;  // enables the sharper GL bound check in analyze

  std::string canonical;  // sorted key=value dump of the resolved config
  std::string hash;       // FNV-1a of `canonical`, 16 hex digits

  ScalingParams params() const;
  ScalingParams params_for(double eps_value) const;
};

/// Builds a RunConfig; unknown keys and bad values raise ConfigError at
/// the entry's location.
RunConfig resolve(const ConfigMap& map, Experiment experiment);

std::string fnv1a_hex(std::string_view text);

// ---------------------------------------------------------------------------
// field dump: text header terminated by "end\n", then little-endian f64
// payload, 3 components per node, x fastest, then y, then layer.

class DumpError : public Error {
 public:
  DumpError(const std::string& what, std::uint64_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

struct FieldDump {
  DirectorField field;
  ScalingParams params;
  std::map<std::string, std::string> header;
};

void write_field_dump(const std::string& path, const DirectorField& U, const ScalingParams& p,
                      const std::string& config_hash, const std::string& datum_note = "");
FieldDump read_field_dump(const std::string& path);

/// Domain nodes where | |U| - 1 | > tol, as "node n (i, j, layer k): |U| = ..." lines.
std::vector<std::string> unit_violations(const DirectorField& U, double tol = 1e-9);

// ---------------------------------------------------------------------------
// subcommands; all return an ExitCode and write their artifacts to out_dir

int cmd_minimize(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_renormalized(const RunConfig& cfg);
int cmd_core(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg);

/// Parses argv (subcommand first), loads config, env and flags, runs.
int run(int argc, char** argv, const char* const* envp);

}  // namespace thinslab::cli
