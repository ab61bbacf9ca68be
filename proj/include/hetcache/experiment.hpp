#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/optimizer.hpp"
#include "hetcache/params.hpp"
#include "hetcache/simulator.hpp"

namespace hetcache::cli {

enum class Mode { Analyze, Simulate, Optimize, Sweep };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct SweepAxis {
  std::string param;  // tau, tau_db, mu, zipf_gamma, Cb, C2, U2, lambda_u
  std::vector<double> values;
};

struct ExperimentSpec {
  Mode mode = Mode::Analyze;
  NetworkParams net;
  ContentConfig content;
  std::optional<CachingPolicy> policy;
  sim::SimConfig sim;
  opt::OptimizerConfig opt;
  std::optional<SweepAxis> sweep_axis;
  std::filesystem::path output_path = "results";
};

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<Mode> mode;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Parses and validates a config document. Throws Error(ConfigError) whose
/// message starts with the offending field path, e.g. "net.U2: ...".
ExperimentSpec parse_spec(const std::string& text, const Overrides& ov = {});
ExperimentSpec load_spec(const std::filesystem::path& path, const Overrides& ov = {});

/// Canonical JSON of everything that affects results (no jobs, no output path).
std::string resolved_config(const ExperimentSpec& spec);
std::string config_hash(const ExperimentSpec& spec);

/// Applies one sweep value to copies of the parameters.
void apply_axis(const std::string& param, double value, NetworkParams& net, ContentConfig& content,
                std::optional<CachingPolicy>& policy);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Computes the result tables without touching the filesystem.
std::vector<Table> compute(const ExperimentSpec& spec);

/// compute() plus CSV and sidecar output; returns the files written.
std::vector<std::filesystem::path> run(const ExperimentSpec& spec);

/// 0 ok, 2 config error, 3 numerical failure, 1 anything else (I/O).
int exit_code(const std::exception& e);

/// The command-line front end: `<mode> --config <path> [--jobs N] [--seed S] [--out <dir>]`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Twelve significant digits, the format of every numeric CSV field.
std::string fmt(double x);

}  // namespace hetcache::cli
