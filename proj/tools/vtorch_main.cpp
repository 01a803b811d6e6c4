#include <iostream>

#include "CLI11.hpp"
#include "vtorch/runner.hpp"

namespace {

void print_summary(const vtorch::RunArtifacts& art) {
  if (art.history.empty()) return;
  const vtorch::HistoryRow& last = art.history.back();
  std::cout << "steps=" << art.history.size() << " t=" << last.t
            << " V=" << last.V << " alpha=" << last.alpha << "\n"
            << "outputs written to " << art.out_dir << "\n";
}

int dispatch(const CLI::App& app, const std::string& cfg_path,
             const std::string& preset_name, double h_override,
             const std::string& method_override, const std::string& out_override,
             const std::vector<std::string>& compare_paths,
             const std::string& compare_out) {
  using namespace vtorch;
  if (app.got_subcommand("run")) {
    print_summary(execute_run(parse_config(read_text_file(cfg_path))));
  } else if (app.got_subcommand("preset")) {
    RunConfig cfg = preset(preset_name);
    if (h_override > 0) cfg.h = h_override;
    if (!method_override.empty()) cfg.method = method_override;
    if (!out_override.empty()) cfg.output.dir = out_override;
    validate(cfg);
    print_summary(execute_run(cfg));
  } else if (app.got_subcommand("sweep")) {
    const ThresholdReport rep = execute_sweep(parse_config(read_text_file(cfg_path)));
    std::cout << sweep_csv(rep);
  } else if (app.got_subcommand("compare")) {
    std::vector<RunConfig> cfgs;
    for (const std::string& p : compare_paths)
      cfgs.push_back(parse_config(read_text_file(p)));
    std::cout << execute_compare(cfgs, compare_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-field and SIMP topology optimization driver"};
  app.require_subcommand(1);

  std::string cfg_path, preset_name, method_override, out_override;
  double h_override = 0;
  std::vector<std::string> compare_paths;
  std::string compare_out = "compare.csv";

  CLI::App* run = app.add_subcommand("run", "run a configuration file");
  run->add_option("config", cfg_path, "path to a config file")->required();

  CLI::App* pre = app.add_subcommand("preset", "run a built-in benchmark");
  pre->add_option("name", preset_name, "preset name (mbb, michell)")->required();
  pre->add_option("--mesh", h_override, "mesh size override");
  pre->add_option("--method", method_override, "method override (vtorch, simp, acpf)");
  pre->add_option("--out", out_override, "output directory override");

  CLI::App* sw = app.add_subcommand("sweep", "threshold sweep of a saved density field");
  sw->add_option("config", cfg_path, "path to a config file")->required();

  CLI::App* cmp = app.add_subcommand("compare", "run several configs, tabulate results");
  cmp->add_option("configs", compare_paths, "config files")->required();
  cmp->add_option("--out", compare_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 5;
  }

  try {
    return dispatch(app, cfg_path, preset_name, h_override, method_override,
                    out_override, compare_paths, compare_out);
  } catch (const vtorch::UnknownPreset& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 5;
  } catch (const vtorch::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vtorch::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vtorch::NonConformingSize& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vtorch::EmptySelection& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vtorch::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const vtorch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
