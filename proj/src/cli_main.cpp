#include <ostream>

#include <CLI11.hpp>

#include "hetcache/error.hpp"
#include "hetcache/experiment.hpp"

namespace hetcache::cli {

int exit_code(const std::exception& e) {
  if (auto* err = dynamic_cast<const Error*>(&e)) return err->code() == ErrorCode::ConfigError ? 2 : 3;
  return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cache-enabled two-tier HetNet with interference nulling: analysis, simulation, optimization"};
  app.require_subcommand(1);

  std::string config, out_dir;
  int jobs = 0;
  long long seed = -1;
  for (const char* name : {"analyze", "simulate", "optimize", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment file")->required();
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "overrides sim.seed and opt.seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "output directory, overrides output_path");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  Overrides ov;
  ov.mode = parse_mode(app.get_subcommands().front()->get_name());
  if (jobs != 0) ov.jobs = jobs;
  if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
  if (!out_dir.empty()) ov.out = out_dir;

  try {
    auto spec = load_spec(config, ov);
    for (const auto& f : run(spec)) out << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace hetcache::cli
