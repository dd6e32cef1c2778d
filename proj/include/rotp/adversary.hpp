#pragma once

// Eavesdropping strategies on the photon channel. An attack only ever sees
// the photon in flight, its position in the stream, and its own RandomStream;
// the known-plaintext wrapper additionally sees the declared known message
// and, after Step 5, the public record.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rotp/keystore.hpp"
#include "rotp/quantum.hpp"
#include "rotp/random.hpp"

namespace rotp::adversary {

using quantum::Basis;
using quantum::JointKetd;
using quantum::Ketd;

enum class IrBasisStrategy { RandomMB, FixedPlus, FixedCross };

struct NoAttack {};

struct InterceptResend {
  IrBasisStrategy strategy = IrBasisStrategy::RandomMB;
};

struct IndividualUtb {
  double theta = 0.0;
  Basis attack_basis = Basis::Plus;
};

using ChannelAttack = std::variant<NoAttack, InterceptResend, IndividualUtb>;

/// Channel attack plus an optional known-plaintext wrapper around it.
struct AttackModel {
  ChannelAttack channel = NoAttack{};
  std::optional<keystore::BitString> known_message;

  static AttackModel none() { return {}; }
  static AttackModel intercept_resend(IrBasisStrategy s) { return {InterceptResend{s}, {}}; }
  /// Throws DomainError unless theta is in [0, pi/4].
  static AttackModel utb(double theta, Basis attack_basis);

  AttackModel with_known_plaintext(keystore::BitString message) const;

  bool is_none() const { return std::holds_alternative<NoAttack>(channel); }
  const IndividualUtb* as_utb() const { return std::get_if<IndividualUtb>(&channel); }
  std::string describe() const;
};

/// Photon as it leaves the channel: alone, or entangled with Eve's probe.
using InFlight = std::variant<Ketd, JointKetd>;

enum class EveStrategy { InterceptResend, IndividualUtb };

struct EveRecord {
  std::size_t photon_index = 0;
  EveStrategy strategy = EveStrategy::InterceptResend;
  /// Measured basis (intercept-resend) or U_TB attack basis.
  Basis eve_basis = Basis::Plus;
  double theta = 0.0;
  std::optional<Bit> measured_outcome;
  /// Probe state conditioned on Bob's outcome; filled once Bob has measured.
  std::optional<Ketd> probe_state;
  /// Eve's computational-basis measurement of her probe.
  std::optional<Bit> probe_outcome;
  /// Guess of the ciphertext photon's eigenstate label in eve_basis.
  std::optional<Bit> inferred_bit_guess;
  /// Filled by known_plaintext_infer.
  std::optional<Basis> inferred_basis_guess;
};

struct AttackOutcome {
  InFlight forwarded;
  std::optional<EveRecord> record;
};

/// Dispatch on the channel attack. The known-plaintext wrapper has no channel
/// action of its own.
AttackOutcome attack_photon(const AttackModel& model, std::size_t photon_index, const Ketd& s,
                            RandomStream& rng);

AttackOutcome intercept_resend(IrBasisStrategy strategy, std::size_t photon_index, const Ketd& s,
                               RandomStream& rng);

/// Entangles the photon with a fresh |0> probe. The record is completed by
/// finish_utb_record after Bob measures.
AttackOutcome utb_intercept(const Ketd& s, double theta, Basis attack_basis,
                            std::size_t photon_index);

/// Stores Bob-conditioned probe state, measures it in the computational
/// basis and derives Eve's bit guess (probe |1> only arises from the xi_bar
/// component).
void finish_utb_record(EveRecord& record, const Ketd& conditional_probe, RandomStream& rng);

/// Probability of Eve's recorded observation given the ciphertext photon.
/// Intercept-resend: |<e_outcome|c>|^2. U_TB: probe-outcome marginal.
double observation_likelihood(const EveRecord& record, const Ketd& ciphertext);

/// Maximum-likelihood measuring-basis guess per photon, combining Eve's
/// records with the encoding bits she can reconstruct: public sample values
/// at announced positions, the known message elsewhere (in order). Ties go
/// to the basis Eve measured in. Photons without a record get nullopt.
std::vector<std::optional<Basis>> known_plaintext_infer(
    const std::vector<EveRecord>& records, const keystore::BitString& known_message,
    const std::vector<std::size_t>& public_sample_positions,
    const keystore::BitString& public_sample_bits, std::size_t n_photons);

}  // namespace rotp::adversary
