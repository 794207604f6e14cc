// Scenario-driven experiment runner for nearest-neighbor heading averaging
// under switching neighbor-graphs.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vicsek/scenario.hpp"

namespace fs = std::filesystem;

namespace {

vicsek::Scenario load_target(const std::string& target) {
  if (fs::exists(target)) {
    return vicsek::parse_scenario_file(target);
  }
  if (const vicsek::Scenario* builtin = vicsek::find_builtin(target)) {
    return *builtin;
  }
  throw vicsek::ScenarioError(
      target, "no such file and no builtin scenario with this name");
}

void print_run_summary(const vicsek::Scenario& scn,
                       const vicsek::RunResult& result, const fs::path& dir) {
  const vicsek::ConvergenceReport& report = result.report;
  std::cout << scn.name << ": " << result.trajectory.steps() << " steps, "
            << "converged=" << (report.converged ? "true" : "false");
  if (report.steps_to_tolerance) {
    std::cout << " at step " << *report.steps_to_tolerance;
  }
  std::cout << ", theta_ss=" << report.theta_ss
            << ", spread=" << (report.M_estimate - report.m_estimate) << "\n";
  if (scn.signal->construction_note()) {
    std::cout << "  note: " << *scn.signal->construction_note() << "\n";
  }
  vicsek::Time horizon = std::max<vicsek::Time>(result.trajectory.steps(), 1);
  if (!scn.signal->is_geometric()) {
    std::cout << "  finally jointly connected: "
              << vicsek::to_string(vicsek::verify_finally_jointly_connected(
                     *scn.signal, horizon))
              << "\n";
  }
  std::cout << "  outputs: " << (dir / scn.name).string() << "\n";
}

int run_one(const vicsek::Scenario& scn, const fs::path& out_dir,
            const vicsek::RunOptions& options) {
  vicsek::RunResult result = vicsek::run_scenario(scn, out_dir, options);
  print_run_summary(scn, result, out_dir);
  return 0;
}

void print_verify_summary(const vicsek::Scenario& scn,
                          const vicsek::VerifySummary& summary) {
  std::cout << scn.name << ": " << summary.steps << " steps\n"
            << "  envelope monotonicity: " << summary.envelope_checks
            << " checks, " << summary.envelope_violations << " violations\n"
            << "  separation steps with hypothesis: "
            << summary.separation_points << " ("
            << summary.separation_confirmed << " confirmed, "
            << summary.separation_ambiguous << " boundary-ambiguous, "
            << summary.separation_violations << " violated)\n";
  if (!summary.first_failure.empty()) {
    std::cout << "  first failure: " << summary.first_failure << "\n";
  }
  std::cout << "  verdict: " << (summary.passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic simulator for heading consensus under "
               "switching neighbor-graphs"};
  app.require_subcommand(1);

  std::string target;
  std::string out_dir = "./out";
  std::string batch_dir;
  vicsek::RunOptions options;
  long long steps_override = -1;
  double tolerance_override = -1.0;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write outputs");
  run->add_option("scenario", target, "scenario file or builtin name");
  run->add_option("--out", out_dir, "output directory (default ./out)");
  run->add_option("--steps", steps_override, "override the step count");
  run->add_option("--tolerance", tolerance_override,
                  "override the consensus tolerance");
  run->add_flag("--graph-log", options.graph_log,
                "also write the per-step graph log");
  run->add_option("--batch", batch_dir,
                  "run every .json scenario file in a directory");

  CLI::App* verify = app.add_subcommand(
      "verify", "run a scenario while checking the averaging invariants");
  verify->add_option("scenario", target, "scenario file or builtin name")
      ->required();
  verify->add_option("--steps", steps_override, "override the step count");
  verify->add_option("--tolerance", tolerance_override,
                     "override the consensus tolerance");

  CLI::App* list =
      app.add_subcommand("scenarios", "list the builtin scenario library");

  CLI11_PARSE(app, argc, argv);

  if (steps_override >= 0) options.steps_override = steps_override;
  if (tolerance_override > 0.0) options.tolerance_override = tolerance_override;

  try {
    if (list->parsed()) {
      for (const vicsek::Scenario& scn : vicsek::builtin_scenarios()) {
        std::cout << scn.name << " — " << scn.description << "\n";
      }
      return 0;
    }
    if (run->parsed()) {
      if (!batch_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(batch_dir)) {
          if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
          }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
          std::cerr << "no .json scenario files in " << batch_dir << "\n";
          return 1;
        }
        for (const fs::path& file : files) {
          run_one(vicsek::parse_scenario_file(file), out_dir, options);
        }
        return 0;
      }
      if (target.empty()) {
        std::cerr << "run needs a scenario file, a builtin name, or --batch\n";
        return 1;
      }
      return run_one(load_target(target), out_dir, options);
    }
    if (verify->parsed()) {
      vicsek::Scenario scn = load_target(target);
      vicsek::VerifySummary summary = vicsek::verify_invariants(scn, options);
      print_verify_summary(scn, summary);
      return summary.passed() ? 0 : 2;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
