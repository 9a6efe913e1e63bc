#include "hspec/runner.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>
#include <utility>

int main(int argc, char** argv) {
  CLI::App app{"Dimension and spectra experiments on horseshoe models"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const std::pair<const char*, const char*> commands[] = {
      {"dims", "pressure and counting dimensions of both Cantor sets"},
      {"curve", "D_u(t) and D_s(t) over run.t_grid"},
      {"spectrum", "Markov and Lagrange values below the threshold"},
      {"prune", "pruned subhorseshoe for each t, plus forbidden-window selection"},
      {"suspend-check", "flow-to-map reduction and dim(Lambda) = dim(K) + 1"},
      {"perturb", "regularity, uniqueness and transversality diagnostics"},
      {"selftest", "built-in checks plus every applicable command"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hspec::kExitOk : hspec::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return hspec::run_and_report(command, config_path, out_dir.empty() ? std::nullopt : std::optional(out_dir));
}
