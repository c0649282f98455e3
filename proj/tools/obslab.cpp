// Command-line front end: one subcommand per experiment plus `suite`.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "obslab/app/experiments.hpp"
#include "obslab/kernels.hpp"

namespace app = obslab::app;

int main(int argc, char** argv) {
  CLI::App cli{"Spectral discretization lab for Schrodinger-type evolutions"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", app::kToolVersion);

  std::string config_path, out_dir = "out", engine;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<int> only;
  std::string configs_dir;

  auto common = [&](CLI::App* s) {
    s->add_option("--out", out_dir, "output directory (OBSLAB_OUT overrides)");
    s->add_option("--engine", engine, "propagation engine")
        ->check(CLI::IsMember({"auto", "multiplier", "splitstep", "dense"}));
    s->add_option("--seed", seed, "seed for randomized probes");
    s->add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  };
  for (const auto& kind : app::experiment_kinds()) {
    auto* s = cli.add_subcommand(kind, "run the " + kind + " experiment");
    s->add_option("--config", config_path, "JSON config (defaults when omitted)");
    common(s);
  }
  auto* suite = cli.add_subcommand("suite", "run the acceptance battery");
  common(suite);
  suite->add_option("--only", only, "criterion numbers to run")->delimiter(',');
  suite->add_option("--write-configs", configs_dir, "write the battery configs to a directory and exit");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? app::kExitPass : app::kExitError;
  }

  if (const char* env = std::getenv("OBSLAB_OUT"); env && *env) out_dir = env;
  if (threads > 0) obslab::kernels::set_threads(threads);
  app::Overrides o;
  if (!engine.empty()) o.engine = engine;
  if (cli.get_subcommands().front()->count("--seed")) o.seed = seed;

  const auto* sub = cli.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "suite") {
    try {
      if (!configs_dir.empty()) {
        std::filesystem::create_directories(configs_dir);
        for (const auto& e : app::suite_entries())
          app::write_text_file(std::filesystem::path(configs_dir) / (e.name + ".json"), app::dump_json(e.config));
        return app::kExitPass;
      }
      const auto s = app::run_suite(o, only);
      app::write_suite(out_dir, s);
      for (const auto& [e, r] : s.parts)
        std::cout << (r.passed() ? "PASS " : "FAIL ") << "criterion " << e.criterion << " " << e.name << "\n";
      return s.summary.passed() ? app::kExitPass : app::kExitFail;
    } catch (const app::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return app::kExitError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return app::kExitError;
    }
  }

  app::Json doc = app::Json::object();
  if (!config_path.empty()) {
    try {
      doc = app::load_json_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return app::kExitError;
    }
  }
  std::string message;
  const int code = app::run_command(name, doc, o, out_dir, message);
  (code == app::kExitError ? std::cerr : std::cout) << message << "\n";
  return code;
}
