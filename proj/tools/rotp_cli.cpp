// rotp: run sessions, attack sweeps, bound tables and pad-reuse demos.
//
// Exit status: 0 accepted, 2 rejected by the eavesdropping check,
// 1 configuration or runtime error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>

#include "rotp/harness.hpp"

namespace {

using rotp::harness::RunSpec;

void add_session_flags(CLI::App& cmd, RunSpec& spec) {
  cmd.add_option("--message-bits", spec.message_bits, "Random message length in bits");
  cmd.add_option("--message", spec.message, "Explicit message as a 0/1 string");
  cmd.add_option("--samples", spec.samples, "Number of sampling bits N_s (default max(32, N_m/4))");
  cmd.add_option("--threshold", spec.threshold, "Abort threshold on the sample error rate");
  cmd.add_flag("--insecure-demo", spec.insecure_demo,
               "Allow a nonzero threshold (releases messages from a noisy channel)");
  cmd.add_option("--pad-in", spec.pad_in, "Read the initial pad from a pad file");
  cmd.add_option("--pad-bits", spec.pad_bits, "Length of the generated pad");
}

void add_attack_flags(CLI::App& cmd, RunSpec& spec, double& theta_deg) {
  cmd.add_option("--attack", spec.attack, "none | intercept_resend | utb")
      ->check(CLI::IsMember({"none", "intercept_resend", "utb"}));
  cmd.add_option("--ir-basis", spec.ir_basis, "random | plus | cross")
      ->check(CLI::IsMember({"random", "plus", "cross"}));
  auto* th = cmd.add_option("--theta", spec.theta, "U_TB attack strength in radians, [0, pi/4]");
  cmd.add_option("--theta-deg", theta_deg, "U_TB attack strength in degrees")->excludes(th);
  cmd.add_option("--utb-basis", spec.utb_basis, "plus | cross")
      ->check(CLI::IsMember({"plus", "cross"}));
  cmd.add_flag("--known-plaintext", spec.known_plaintext, "Eve knows the message in advance");
}

void add_output_flags(CLI::App& cmd, RunSpec& spec) {
  cmd.add_option("--out", spec.out, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeatable one-time-pad crypto-system simulator"};
  app.require_subcommand(1);

  RunSpec spec;
  if (const char* env = std::getenv("ROTP_SEED")) {
    try {
      spec.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: ROTP_SEED must be an unsigned integer\n";
      return rotp::harness::kError;
    }
  }
  double theta_deg = -1;
  std::string format = "json";

  auto* run = app.add_subcommand("run", "Execute one session and write its transcript");
  add_session_flags(*run, spec);
  add_attack_flags(*run, spec, theta_deg);
  add_output_flags(*run, spec);
  run->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--pad-out", spec.pad_out, "Write the recycled pad here on acceptance");
  run->add_flag("--reveal", spec.reveal, "Print the extracted message, not just its digest");

  auto* sweep = app.add_subcommand("sweep-theta", "U_TB error rate and leakage over a theta grid");
  sweep->add_option("--thetas", spec.thetas, "Explicit theta grid (radians)")->delimiter(',');
  sweep->add_option("--grid", spec.grid_points, "Evenly spaced points over [0, pi/4]");
  sweep->add_option("--photons", spec.photons, "Photons per grid point");
  sweep->add_option("--utb-basis", spec.utb_basis, "plus | cross")
      ->check(CLI::IsMember({"plus", "cross"}));
  sweep->add_option("--jobs", spec.jobs, "Grid points evaluated in parallel");
  add_output_flags(*sweep, spec);

  auto* bounds = app.add_subcommand("bounds", "Closed-form information bounds as CSV");
  bounds->add_option("--d", spec.d_grid, "Explicit error-rate grid")->delimiter(',');
  bounds->add_option("--d-min", spec.d_min);
  bounds->add_option("--d-max", spec.d_max);
  bounds->add_option("--points", spec.d_points);
  add_output_flags(*bounds, spec);

  auto* demo = app.add_subcommand("recycle-demo", "Consecutive sessions on one recycled pad lineage");
  add_session_flags(*demo, spec);
  add_attack_flags(*demo, spec, theta_deg);
  add_output_flags(*demo, spec);
  demo->add_option("--sessions", spec.sessions, "Number of sessions M");
  demo->add_option("--attack-session", spec.attack_session,
                   "1-based session that runs under --attack (others are clean)");

  for (auto* cmd : {run, sweep, bounds, demo})
    cmd->add_option("--seed", spec.seed, "Root seed (default $ROTP_SEED or 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rotp::harness::kError;
  }

  if (theta_deg >= 0) spec.theta = theta_deg * std::numbers::pi / 180.0;
  spec.format = format == "csv" ? rotp::harness::OutputFormat::CSV
                                : rotp::harness::OutputFormat::StructuredText;

  if (run->parsed()) return rotp::harness::cmd_run(spec, std::cout, std::cerr);
  if (sweep->parsed()) return rotp::harness::cmd_sweep_theta(spec, std::cout, std::cerr);
  if (bounds->parsed()) return rotp::harness::cmd_bounds(spec, std::cout, std::cerr);
  return rotp::harness::cmd_recycle_demo(spec, std::cout, std::cerr);
}
