// eegrid - wavelet-feature EEG classification pipeline driver.
//
// Subcommands: extract, experiment, compare, interp-dump, selftest.
// Every config key can be overridden on the command line, e.g.
//   eegrid experiment --config run.json --set classifier=svm --set seed=7

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegrid/config.hpp"
#include "eegrid/experiment.hpp"
#include "eegrid/recording.hpp"
#include "eegrid/selfcheck.hpp"
#include "eegrid/synthetic.hpp"
#include "eegrid/topomap.hpp"
#include "eegrid/util.hpp"

namespace {

using eegrid::ExperimentConfig;

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("override must look like key=value: '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

int cmd_extract(const std::string& config_file, const std::vector<std::string>& sets) {
  const ExperimentConfig cfg = eegrid::build_config(config_file, parse_overrides(sets));
  const auto result = eegrid::run_extract(cfg);
  std::cout << "{\"config_hash\":\"" << result.config_hash << "\",\"samples_file\":\""
            << result.samples_file << "\",\"sample_count\":" << result.sample_count << "}\n";
  return 0;
}

int cmd_experiment(const std::string& config_file, const std::vector<std::string>& sets) {
  const ExperimentConfig cfg = eegrid::build_config(config_file, parse_overrides(sets));
  const auto report = eegrid::run_experiment(cfg);
  std::cout << report.to_jsonl();
  return 0;
}

int cmd_compare(const std::string& config_a, const std::string& config_b,
                const std::vector<std::string>& sets) {
  const auto overrides = parse_overrides(sets);
  const ExperimentConfig arm_a = eegrid::build_config(config_a, overrides);
  const ExperimentConfig arm_b = eegrid::build_config(config_b, overrides);
  const auto report = eegrid::run_compare(arm_a, arm_b);
  std::cout << report.to_json() << "\n";
  return 0;
}

int cmd_interp_dump(const std::string& config_file, const std::vector<std::string>& sets,
                    const std::string& values_file, const std::string& out_prefix) {
  const ExperimentConfig cfg = eegrid::build_config(config_file, parse_overrides(sets));
  const eegrid::Montage montage =
      cfg.montage_path().empty()
          ? (cfg.task == "sad" ? eegrid::builtin_montage_sad34()
                               : eegrid::builtin_montage_deap32())
          : eegrid::load_montage(cfg.montage_path());
  const auto proj = eegrid::project_montage(montage, cfg.grid_size);

  std::vector<double> values(montage.size());
  if (values_file.empty()) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
  } else {
    std::ifstream in(values_file);
    if (!in) throw std::runtime_error("cannot open " + values_file);
    std::vector<bool> seen(values.size(), false);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = eegrid::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto cells = eegrid::split(t, ',');
      if (cells.size() != 2) throw std::runtime_error("expected 'channel,value': " + line);
      const int idx = montage.index_of(eegrid::trim(cells[0]));
      if (idx < 0) throw std::runtime_error("unknown channel '" + cells[0] + "'");
      values[static_cast<std::size_t>(idx)] =
          eegrid::parse_double_strict(cells[1], values_file);
      seen[static_cast<std::size_t>(idx)] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) throw std::runtime_error("no value for channel '" + montage.names[i] + "'");
    }
  }

  eegrid::InterpConfig interp;
  interp.method = eegrid::interp_method_from_name(cfg.interpolation.method);
  interp.d_max = cfg.interpolation.d_max;
  interp.idw_power = cfg.interpolation.idw_power;
  const eegrid::Matrix grid = eegrid::interpolate(values, proj, interp);
  eegrid::write_slice_pgm(grid, out_prefix + ".pgm");
  eegrid::write_slice_csv(grid, out_prefix + ".csv");
  std::cout << "wrote " << out_prefix << ".pgm and " << out_prefix << ".csv\n";
  return 0;
}

int cmd_selftest(bool quick) {
  const auto results = eegrid::selfcheck::run_selftest(quick);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " - " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sensor-configuration-aware EEG classification pipeline"};
  app.require_subcommand(1);

  std::string config_file;
  std::string config_file_b;
  std::vector<std::string> sets;
  std::string values_file;
  std::string out_prefix = "slice";
  bool quick = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config file");
    sub->add_option("--set", sets, "override a config key, key=value (repeatable)");
  };

  CLI::App* extract = app.add_subcommand("extract", "extract feature samples to disk");
  add_common(extract);
  CLI::App* experiment = app.add_subcommand("experiment", "run the k-fold experiment");
  add_common(experiment);
  CLI::App* compare =
      app.add_subcommand("compare", "paired comparison of two configs with a Wilcoxon test");
  compare->add_option("--config-a", config_file, "JSON config for arm A")->required();
  compare->add_option("--config-b", config_file_b, "JSON config for arm B")->required();
  compare->add_option("--set", sets, "override applied to both arms (repeatable)");
  CLI::App* interp_dump =
      app.add_subcommand("interp-dump", "write one interpolated K x K slice as PGM + CSV");
  add_common(interp_dump);
  interp_dump->add_option("--values", values_file, "channel,value CSV (default: index ramp)");
  interp_dump->add_option("--out", out_prefix, "output path prefix");
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle suites");
  selftest->add_flag("--quick", quick, "smaller sample counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) return cmd_extract(config_file, sets);
    if (experiment->parsed()) return cmd_experiment(config_file, sets);
    if (compare->parsed()) return cmd_compare(config_file, config_file_b, sets);
    if (interp_dump->parsed()) return cmd_interp_dump(config_file, sets, values_file, out_prefix);
    if (selftest->parsed()) return cmd_selftest(quick);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
