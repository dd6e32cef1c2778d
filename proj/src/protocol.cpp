#include "rotp/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace rotp::protocol {

BitString ModifiedMessage::strip_samples(const BitString& source) const {
  BitString out;
  out.reserve(source.size() - std::min(source.size(), sample_positions.size()));
  for (std::size_t i = 0; i < source.size(); ++i)
    if (!is_sample(i)) out.push_back(source[i]);
  return out;
}

ModifiedMessage build_modified_message(const BitString& message, std::size_t n_sample,
                                       RandomStream& rng) {
  const std::size_t n = message.size() + n_sample;

  // Partial Fisher-Yates: the first n_sample slots are a uniform subset.
  std::vector<std::size_t> slots(n);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_sample; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(slots[i], slots[j]);
  }

  ModifiedMessage mm;
  mm.sample_positions.assign(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n_sample));
  std::sort(mm.sample_positions.begin(), mm.sample_positions.end());
  for (std::size_t p : mm.sample_positions) mm.sample_values[p] = rng.bit() ? 1 : 0;

  mm.bits.reserve(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = mm.sample_values.find(i);
    mm.bits.push_back(it != mm.sample_values.end() ? it->second : message[next++]);
  }
  return mm;
}

std::vector<Ketd> alice_encode(const keystore::BasisKeySequence& keys, const ModifiedMessage& mm) {
  if (keys.size() != mm.size())
    throw DomainError("basis-key count " + std::to_string(keys.size()) +
                      " does not match modified message length " + std::to_string(mm.size()));
  std::vector<Ketd> photons;
  photons.reserve(mm.size());
  for (std::size_t i = 0; i < mm.size(); ++i) {
    photons.push_back(quantum::apply_encoding(quantum::encoding_for_bit(mm.bits[i]),
                                              quantum::state_from_basis_key(keys.pairs[i])));
  }
  return photons;
}

BobObservation bob_receive(const adversary::InFlight& photon, BasisKeyPair key,
                           RandomStream& rng) {
  const Basis b = key.basis();
  BobObservation obs{};
  if (const auto* alone = std::get_if<Ketd>(&photon)) {
    obs.outcome = quantum::measure(*alone, b, rng).outcome;
  } else {
    const auto m = quantum::measure_photon_of_joint(std::get<quantum::JointKetd>(photon), b, rng);
    obs.outcome = m.outcome;
    obs.probe = m.probe;
  }
  obs.decoded = obs.outcome == key.eigen_index() ? 0 : 1;
  return obs;
}

BitString bob_decode(const std::vector<Ketd>& photons, const keystore::BasisKeySequence& keys,
                     RandomStream& rng) {
  if (photons.size() != keys.size()) throw DomainError("photon and basis-key counts differ");
  BitString out;
  out.reserve(photons.size());
  for (std::size_t i = 0; i < photons.size(); ++i)
    out.push_back(bob_receive(photons[i], keys.pairs[i], rng).decoded);
  return out;
}

PublicRecord announce_samples(const ModifiedMessage& mm, const BitString& decoded) {
  PublicRecord pub;
  pub.sample_positions = mm.sample_positions;
  pub.announced_bits.reserve(mm.sample_positions.size());
  for (std::size_t p : mm.sample_positions) {
    if (p >= decoded.size()) throw DomainError("decoded bits do not cover sample positions");
    pub.announced_bits.push_back(decoded[p]);
  }
  return pub;
}

ErrorReport eavesdrop_check(const ModifiedMessage& mm, const BitString& decoded, double threshold) {
  const PublicRecord pub = announce_samples(mm, decoded);
  ErrorReport r;
  r.n_checked = pub.sample_positions.size();
  for (std::size_t i = 0; i < r.n_checked; ++i)
    if (pub.announced_bits[i] != mm.sample_values.at(pub.sample_positions[i])) ++r.n_errors;
  r.rate = r.n_checked ? static_cast<double>(r.n_errors) / static_cast<double>(r.n_checked) : 0.0;
  r.accepted = r.n_checked > 0 && r.rate <= threshold;
  return r;
}

std::size_t SessionConfig::default_samples(std::size_t n_message) {
  return std::max<std::size_t>(32, n_message / 4);
}

void SessionConfig::validate() const {
  if (n_sample < 1) throw ConfigError("at least one sampling bit is required (n_sample >= 1)");
  if (!(abort_threshold >= 0.0 && abort_threshold <= 1.0))
    throw ConfigError("abort threshold must lie in [0, 1]");
  if (abort_threshold > 0.0 && !insecure_demo)
    throw ConfigError("a nonzero abort threshold releases messages from a noisy channel; "
                      "pass the insecure-demo flag to allow it");
}

BitString SessionTranscript::decoded_bits() const {
  BitString out;
  out.reserve(photons.size());
  for (const auto& p : photons) out.push_back(p.decoded_bit);
  return out;
}

SessionTranscript run_session(const SessionConfig& config, const keystore::PadKey& pad,
                              const BitString& message, const adversary::AttackModel& attack) {
  config.validate();
  if (message.size() != config.n_message)
    throw ConfigError("message has " + std::to_string(message.size()) + " bits, config says " +
                      std::to_string(config.n_message));

  RandomStream alice_rng(derive_seed(config.seed, 0));
  RandomStream eve_rng(derive_seed(config.seed, 1));
  RandomStream bob_rng(derive_seed(config.seed, 2));

  SessionTranscript t;
  t.config = config;
  t.attack = attack;
  t.pad_length = pad.size();
  t.pad_generation = pad.generation;

  // Step 2, then Step 3 on the pad prefix.
  t.modified = build_modified_message(message, config.n_sample, alice_rng);
  t.keys = keystore::draw_basis_keys(pad, t.modified.size());
  const std::vector<Ketd> ciphertext = alice_encode(t.keys, t.modified);

  // Channel and Step 4.
  const std::size_t n = ciphertext.size();
  t.photons.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [forwarded, record] = adversary::attack_photon(attack, i, ciphertext[i], eve_rng);
    const BobObservation obs = bob_receive(forwarded, t.keys.pairs[i], bob_rng);
    if (record) {
      if (record->strategy == adversary::EveStrategy::IndividualUtb)
        adversary::finish_utb_record(*record, obs.probe.value(), eve_rng);
      t.attack_events.push_back(std::move(*record));
    }

    PhotonRecord pr;
    pr.index = i;
    pr.basis_key = t.keys.pairs[i];
    pr.prepared = quantum::state_from_basis_key(pr.basis_key);
    pr.encoding = quantum::encoding_for_bit(t.modified.bits[i]);
    pr.ciphertext = ciphertext[i];
    pr.received_outcome = obs.outcome;
    pr.decoded_bit = obs.decoded;
    pr.is_sample = t.modified.is_sample(i);
    t.photons.push_back(pr);
  }

  // Step 5.
  const BitString decoded = t.decoded_bits();
  t.public_record = announce_samples(t.modified, decoded);
  t.error_report = eavesdrop_check(t.modified, decoded, config.abort_threshold);

  for (const auto& src : t.keys.source_indices)
    for (std::size_t idx : src) t.used_origin_bits.push_back(pad.origin.at(idx));
  for (std::size_t p : t.public_record.sample_positions)
    for (std::size_t idx : t.keys.source_indices[p]) t.announced_origin_bits.insert(pad.origin.at(idx));

  if (attack.known_message) {
    t.basis_guesses = adversary::known_plaintext_infer(
        t.attack_events, *attack.known_message, t.public_record.sample_positions,
        t.public_record.announced_bits, n);
    for (auto& rec : t.attack_events) rec.inferred_basis_guess = t.basis_guesses[rec.photon_index];
  }

  // Step 6, only on a passed check.
  if (t.error_report.accepted) {
    const std::set<std::size_t> announced(t.public_record.sample_positions.begin(),
                                          t.public_record.sample_positions.end());
    keystore::PadKey ledgered = pad;
    for (std::size_t p : announced)
      ledgered.published.insert(t.keys.source_indices[p].begin(), t.keys.source_indices[p].end());
    t.recycled_pad =
        keystore::recycle_pad(ledgered, announced, t.keys, keystore::CheckOutcome::Passed);
    t.extracted_message = t.modified.strip_samples(decoded);
  }
  return t;
}

}  // namespace rotp::protocol
