#include "hfm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "hfm/simulation.hpp"

#ifndef HFM_SCENARIO_DIR
#define HFM_SCENARIO_DIR "scenarios"
#endif

namespace hfm {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string scenario;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool json = false;
  std::string scenario_dir = HFM_SCENARIO_DIR;
};

void report(const ScenarioError& e, const std::string& source, std::ostream& err) {
  for (const auto& d : e.diagnostics()) err << d.str(source) << '\n';
}

Scenario load(const Options& opt) {
  std::vector<std::string> overrides = opt.overrides;
  if (opt.seed) overrides.push_back("contact.seed=" + std::to_string(*opt.seed));
  return load_scenario(opt.scenario, overrides);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

void write_records(const fs::path& path, const std::vector<StepRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  write_csv(f, records);
}

void print_summary(const Options& opt, const std::string& label, const RunSummary& s,
                   std::ostream& out) {
  if (opt.json) {
    out << summary_json(s) << '\n';
  } else if (!opt.quiet) {
    out << "[" << label << "]\n" << format_summary(s);
  }
}

template <class Body>
int with_scenario(const Options& opt, std::ostream& err, Body&& body) {
  Scenario scenario;
  try {
    scenario = load(opt);
  } catch (const ScenarioError& e) {
    report(e, opt.scenario, err);
    return kExitInvalidScenario;
  }
  const fs::path out_dir(opt.out_dir);
  try {
    fs::create_directories(out_dir);
    return body(scenario, out_dir);
  } catch (const SimulationDiverged& e) {
    write_records(out_dir / (scenario.name + ".partial.csv"), e.partial());
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const NoContactReached& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidScenario;
  }
}

int do_run(const Options& opt, std::ostream& out, std::ostream& err) {
  return with_scenario(opt, err, [&](const Scenario& s, const fs::path& dir) {
    const RunResult r = run(s);
    write_records(dir / (s.name + ".csv"), r.records);
    write_file(dir / (s.name + ".summary.txt"), "scenario = " + s.name + "\n" + format_summary(r.summary));
    if (!opt.quiet) {
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    }
    print_summary(opt, s.name, r.summary, out);
    return kExitOk;
  });
}

int do_compare(const Options& opt, std::ostream& out, std::ostream& err) {
  return with_scenario(opt, err, [&](const Scenario& s, const fs::path& dir) {
    const Comparison c = compare(s);
    write_records(dir / (s.name + ".on.csv"), c.on.records);
    write_records(dir / (s.name + ".off.csv"), c.off.records);
    write_file(dir / (s.name + ".on.summary.txt"),
               "scenario = " + s.name + "\nestimator = on\n" + format_summary(c.on.summary));
    write_file(dir / (s.name + ".off.summary.txt"),
               "scenario = " + s.name + "\nestimator = off\n" + format_summary(c.off.summary));
    const std::string delta = format_delta(c.on.summary, c.off.summary);
    write_file(dir / (s.name + ".delta.txt"), "scenario = " + s.name + "\n" + delta);
    print_summary(opt, s.name + " on", c.on.summary, out);
    print_summary(opt, s.name + " off", c.off.summary, out);
    if (!opt.quiet && !opt.json) out << "[delta]\n" << delta;
    return kExitOk;
  });
}

int do_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    load(opt);
  } catch (const ScenarioError& e) {
    report(e, opt.scenario, err);
    return kExitInvalidScenario;
  }
  if (!opt.quiet) out << opt.scenario << ": ok\n";
  return kExitOk;
}

int do_list(const Options& opt, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(opt.scenario_dir, ec)) {
    if (entry.path().extension() == ".cfg") files.push_back(entry.path());
  }
  if (ec) {
    err << "error: cannot list '" << opt.scenario_dir << "': " << ec.message() << '\n';
    return kExitInvalidScenario;
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line, title;
    while (std::getline(in, line)) {
      if (line.rfind("# ", 0) == 0) {
        title = line.substr(2);
        break;
      }
    }
    out << f.stem().string();
    if (!title.empty()) out << "  " << title;
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid force-motion control simulator", "hfm_sim"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", opt.scenario, "Scenario file")->required();
    sub->add_option("--set", opt.overrides, "Override a scenario key (KEY=VALUE), repeatable");
    sub->add_option("--seed", opt.seed, "Noise seed (overrides contact.seed)");
    sub->add_flag("--quiet", opt.quiet, "Suppress summaries and warnings");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario");
  add_common(run_cmd);
  run_cmd->add_option("--out", opt.out_dir, "Output directory");
  run_cmd->add_flag("--json", opt.json, "Print the summary as one JSON line");

  CLI::App* compare_cmd = app.add_subcommand("compare", "Run with the estimator on and off");
  add_common(compare_cmd);
  compare_cmd->add_option("--out", opt.out_dir, "Output directory");
  compare_cmd->add_flag("--json", opt.json, "Print summaries as JSON lines");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  add_common(validate_cmd);

  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "List shipped scenarios");
  list_cmd->add_option("--dir", opt.scenario_dir, "Scenario directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (run_cmd->parsed()) return do_run(opt, out, err);
  if (compare_cmd->parsed()) return do_compare(opt, out, err);
  if (validate_cmd->parsed()) return do_validate(opt, out, err);
  return do_list(opt, out, err);
}

}  // namespace hfm
