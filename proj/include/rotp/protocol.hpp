#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rotp/adversary.hpp"
#include "rotp/keystore.hpp"
#include "rotp/quantum.hpp"
#include "rotp/random.hpp"

namespace rotp::protocol {

using keystore::BitString;
using quantum::Basis;
using quantum::BasisKeyPair;
using quantum::EncodingOp;
using quantum::Ketd;

/// Message bits with sampling bits inserted at random positions.
struct ModifiedMessage {
  BitString bits;
  /// Sorted ascending.
  std::vector<std::size_t> sample_positions;
  std::map<std::size_t, Bit> sample_values;

  std::size_t size() const { return bits.size(); }
  bool is_sample(std::size_t i) const { return sample_values.count(i) != 0; }
  /// The non-sample subsequence of `source`, in order.
  BitString strip_samples(const BitString& source) const;
  BitString message() const { return strip_samples(bits); }
};

/// Inserts n_sample i.i.d. uniform bits at a uniformly random set of
/// positions among the N = |message| + n_sample slots. n_sample = 0 is
/// accepted here (degenerate test input); sessions require n_sample >= 1.
ModifiedMessage build_modified_message(const BitString& message, std::size_t n_sample,
                                       RandomStream& rng);

/// Ciphertext photons: U_{bit_i} applied to the state named by pair i.
std::vector<Ketd> alice_encode(const keystore::BasisKeySequence& keys, const ModifiedMessage& mm);

struct BobObservation {
  Bit outcome;
  Bit decoded;
  /// Eve's probe conditioned on this outcome, for entangled arrivals.
  std::optional<Ketd> probe;
};

/// Measures one arriving photon in the basis of its basis-key. Decodes 0 when
/// the observed eigenstate is the prepared one, 1 otherwise.
BobObservation bob_receive(const adversary::InFlight& photon, BasisKeyPair key, RandomStream& rng);

BitString bob_decode(const std::vector<Ketd>& photons, const keystore::BasisKeySequence& keys,
                     RandomStream& rng);

struct ErrorReport {
  std::size_t n_checked = 0;
  std::size_t n_errors = 0;
  double rate = 0.0;
  bool accepted = false;
};

/// What Eve may read: Alice's announced positions, then Bob's announced
/// decoded bits at those positions. Never basis keys or states.
struct PublicRecord {
  std::vector<std::size_t> sample_positions;
  BitString announced_bits;
};

PublicRecord announce_samples(const ModifiedMessage& mm, const BitString& decoded);

/// Step-5 comparison of Bob's announced sample bits with Alice's record.
ErrorReport eavesdrop_check(const ModifiedMessage& mm, const BitString& decoded, double threshold);

struct SessionConfig {
  std::size_t n_message = 0;
  std::size_t n_sample = 32;
  /// Maximum tolerated sample error rate. 0 is the ideal-channel setting.
  double abort_threshold = 0.0;
  std::uint64_t seed = 0;
  /// Required for any abort_threshold > 0: releasing a message over a
  /// channel with tolerated errors leaks information that would need privacy
  /// amplification.
  bool insecure_demo = false;

  /// max(32, n_message / 4).
  static std::size_t default_samples(std::size_t n_message);
  std::size_t n_photons() const { return n_message + n_sample; }
  /// Throws ConfigError.
  void validate() const;
};

struct PhotonRecord {
  std::size_t index = 0;
  BasisKeyPair basis_key;
  Ketd prepared;
  EncodingOp encoding = EncodingOp::U0;
  Ketd ciphertext;
  Bit received_outcome = 0;
  Bit decoded_bit = 0;
  bool is_sample = false;
};

/// Full record of one session, secret parts included. public_record is the
/// only part that crosses the classical channel.
struct SessionTranscript {
  SessionConfig config;
  adversary::AttackModel attack;
  ModifiedMessage modified;
  keystore::BasisKeySequence keys;
  std::vector<PhotonRecord> photons;
  std::vector<adversary::EveRecord> attack_events;
  PublicRecord public_record;
  ErrorReport error_report;
  std::size_t pad_length = 0;
  std::uint64_t pad_generation = 0;
  /// Lineage indices (PadKey::origin) of bits used to prepare photons, and of
  /// the subset whose photons were announced.
  std::vector<std::size_t> used_origin_bits;
  std::set<std::size_t> announced_origin_bits;
  std::optional<keystore::PadKey> recycled_pad;
  std::optional<BitString> extracted_message;
  /// Known-plaintext basis guesses; empty unless that wrapper is active.
  std::vector<std::optional<Basis>> basis_guesses;

  BitString decoded_bits() const;
};

/// Steps 2-6 on the prefix of `pad`. On acceptance attaches the recycled pad
/// and the extracted message; on rejection attaches neither.
SessionTranscript run_session(const SessionConfig& config, const keystore::PadKey& pad,
                              const BitString& message, const adversary::AttackModel& attack);

}  // namespace rotp::protocol
