#pragma once

// Subcommand implementations behind the `rotp` CLI. Every stochastic output
// is a pure function of the RunSpec (seed included).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rotp/adversary.hpp"
#include "rotp/keystore.hpp"
#include "rotp/protocol.hpp"

namespace rotp::harness {

enum ExitCode : int { kAccepted = 0, kError = 1, kRejected = 2 };

enum class OutputFormat { CSV, StructuredText };

struct RunSpec {
  // Session
  std::size_t message_bits = 128;
  std::optional<std::string> message;  // explicit "0101..." message
  std::optional<std::size_t> samples;  // default SessionConfig::default_samples
  double threshold = 0.0;
  bool insecure_demo = false;
  std::uint64_t seed = 0;

  // Attack
  std::string attack = "none";  // none | intercept_resend | utb
  std::string ir_basis = "random";
  double theta = 0.0;
  std::string utb_basis = "plus";
  bool known_plaintext = false;

  // Pad
  std::optional<std::filesystem::path> pad_in;
  std::optional<std::filesystem::path> pad_out;
  std::size_t pad_bits = 0;  // 0: exactly what the command needs

  // Output
  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::StructuredText;
  bool reveal = false;

  // sweep-theta
  std::vector<double> thetas;  // explicit grid; otherwise grid_points over [0, pi/4]
  std::size_t grid_points = 5;
  std::size_t photons = 10000;
  unsigned jobs = 1;

  // bounds
  std::vector<double> d_grid;  // explicit grid; otherwise d_points over [d_min, d_max]
  double d_min = 0.0;
  double d_max = 0.25;
  std::size_t d_points = 26;

  // recycle-demo
  std::size_t sessions = 5;
  std::optional<std::size_t> attack_session;  // 1-based; others run without attack
};

/// Throws ConfigError on unknown names.
adversary::AttackModel attack_from_spec(const RunSpec& spec, const keystore::BitString& message);

/// Explicit message, or message_bits random bits from the seed.
keystore::BitString message_from_spec(const RunSpec& spec, std::uint64_t stream);

protocol::SessionConfig session_config_from_spec(const RunSpec& spec, std::size_t n_message,
                                                 std::uint64_t session_seed);

struct SweepRow {
  double theta = 0;
  double d_theory = 0;
  double d_matched_empirical = 0;
  double d_overall_empirical = 0;
  double mi_empirical = 0;
  double i0_at_d = 0;
  std::size_t n_matched = 0;
  std::size_t n_overall = 0;
};

std::vector<double> theta_grid(const RunSpec& spec);
std::vector<SweepRow> sweep_theta(const RunSpec& spec);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

std::vector<double> d_grid(const RunSpec& spec);

struct DemoSession {
  std::size_t session = 0;  // 1-based
  std::size_t pad_bits_before = 0;
  std::size_t pad_bits_after = 0;
  std::uint64_t generation = 0;
  bool attacked = false;
  bool accepted = false;
  double error_rate = 0;
  bool message_exact = false;
};

struct RecycleDemoReport {
  std::size_t initial_pad_bits = 0;
  std::size_t final_pad_bits = 0;
  std::vector<DemoSession> sessions;
  bool halted = false;
  /// Every accepted session released exactly its input message.
  bool all_messages_exact = false;
  /// Announced lineage bits later used to prepare photons. Must be 0.
  std::size_t reused_announced_bits = 0;
};

/// Throws PadExhausted with the session index if the lineage runs dry.
RecycleDemoReport recycle_demo(const RunSpec& spec);

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& log);
int cmd_sweep_theta(const RunSpec& spec, std::ostream& out, std::ostream& log);
int cmd_bounds(const RunSpec& spec, std::ostream& out, std::ostream& log);
int cmd_recycle_demo(const RunSpec& spec, std::ostream& out, std::ostream& log);

}  // namespace rotp::harness
