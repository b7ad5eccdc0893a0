#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "spinwire/runner.hpp"
#include "spinwire/scenario.hpp"

namespace {

using namespace spinwire;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitCheckFailure = 2;

void apply_overrides(ScenarioConfig& config, const std::string& engine,
                     const std::string& mode, int nodes) {
  if (!engine.empty()) config.engine = engine;
  if (!mode.empty()) config.mode = mode;
  if (nodes > 0) config.quadrature_nodes = nodes;
  config.validate();
}

int report_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << c.value
              << " tolerance=" << c.tolerance << "\n";
    ok = ok && c.pass;
  }
  return ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement dynamics of a mobile spin scattered by static spins"};
  app.require_subcommand(1);

  std::string target, out_dir = "out", engine, mode, axis, values_csv;
  int nodes = 0;

  auto* run = app.add_subcommand("run", "run a preset or a config file");
  run->add_option("target", target, "preset name or config path")->required();
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--engine", engine, "spectral | lattice | both");
  run->add_option("--mode", mode, "quasi | exact");
  run->add_option("--quadrature-nodes", nodes, "Gauss-Legendre node count");

  auto* sw = app.add_subcommand("sweep", "sweep one axis of a config");
  sw->add_option("target", target, "config path (sweep template)")->required();
  sw->add_option("--axis", axis, "dk_over_k0 | j_over_v | k0d | spin | model")
      ->required();
  sw->add_option("--values", values_csv, "comma-separated axis values")->required();
  sw->add_option("--out-dir", out_dir, "output directory");
  sw->add_option("--engine", engine, "spectral | lattice | both");
  sw->add_option("--mode", mode, "quasi | exact");
  sw->add_option("--quadrature-nodes", nodes, "Gauss-Legendre node count");

  auto* lp = app.add_subcommand("list-presets", "list built-in presets");
  (void)lp;

  auto* vc = app.add_subcommand("validate-config", "parse and validate a config file");
  vc->add_option("target", target, "config path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-presets")) {
      for (const auto& p : presets()) {
        std::cout << p.name << ": " << p.description << " (" << p.variants.size()
                  << " variant" << (p.variants.size() == 1 ? "" : "s") << ")\n";
      }
      return kExitOk;
    }

    if (app.got_subcommand("validate-config")) {
      const ScenarioConfig config = load_config(target);
      std::cout << "ok: " << config.name << "\n";
      return kExitOk;
    }

    if (app.got_subcommand("run")) {
      const std::filesystem::path base(out_dir);
      if (const Preset* preset = find_preset(target)) {
        Preset adjusted = *preset;
        for (auto& v : adjusted.variants) {
          apply_overrides(v.config, engine, mode, nodes);
        }
        const PresetResult result = run_preset(adjusted);
        write_preset_outputs(result, base / preset->name);
        std::cout << "outputs in " << (base / preset->name).string() << "\n";
        return report_checks(result.checks);
      }
      ScenarioConfig config = load_config(target);
      apply_overrides(config, engine, mode, nodes);
      const ScenarioResult result = run_scenario(config);
      write_scenario_outputs(result, base / config.name);
      std::cout << "outputs in " << (base / config.name).string() << "\n";
      return report_checks(result.checks);
    }

    if (app.got_subcommand("sweep")) {
      ScenarioConfig config = load_config(target);
      apply_overrides(config, engine, mode, nodes);
      std::vector<std::string> values;
      std::stringstream ss(values_csv);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(item);
      if (values.empty()) throw ConfigError("sweep.values", "no values given");
      const SweepResult result = sweep(config, axis, values);
      write_sweep_outputs(result, std::filesystem::path(out_dir) /
                                      (config.name + "_sweep_" + axis));
      std::vector<CheckResult> all = result.checks;
      for (size_t i = 0; i < result.runs.size(); ++i) {
        for (const auto& c : result.runs[i].checks) {
          all.push_back(c);
          all.back().name = result.labels[i] + "." + c.name;
        }
      }
      return report_checks(all);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}
