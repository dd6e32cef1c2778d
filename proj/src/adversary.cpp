#include "rotp/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rotp::adversary {

AttackModel AttackModel::utb(double theta, Basis attack_basis) {
  quantum::check_attack_angle(theta);
  return {IndividualUtb{theta, attack_basis}, {}};
}

AttackModel AttackModel::with_known_plaintext(keystore::BitString message) const {
  AttackModel m = *this;
  m.known_message = std::move(message);
  return m;
}

std::string AttackModel::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, NoAttack>) {
          os << "none";
        } else if constexpr (std::is_same_v<T, InterceptResend>) {
          os << "intercept_resend("
             << (a.strategy == IrBasisStrategy::RandomMB    ? "random"
                 : a.strategy == IrBasisStrategy::FixedPlus ? "plus"
                                                            : "cross")
             << ")";
        } else {
          os << "utb(theta=" << a.theta << ", basis=" << quantum::to_string(a.attack_basis)
             << ")";
        }
      },
      channel);
  if (known_message) os << "+known_plaintext";
  return os.str();
}

AttackOutcome attack_photon(const AttackModel& model, std::size_t photon_index, const Ketd& s,
                            RandomStream& rng) {
  return std::visit(
      [&](const auto& a) -> AttackOutcome {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, NoAttack>) {
          return {s, std::nullopt};
        } else if constexpr (std::is_same_v<T, InterceptResend>) {
          return intercept_resend(a.strategy, photon_index, s, rng);
        } else {
          return utb_intercept(s, a.theta, a.attack_basis, photon_index);
        }
      },
      model.channel);
}

AttackOutcome intercept_resend(IrBasisStrategy strategy, std::size_t photon_index, const Ketd& s,
                               RandomStream& rng) {
  Basis b = Basis::Plus;
  switch (strategy) {
    case IrBasisStrategy::RandomMB: b = rng.bit() ? Basis::Cross : Basis::Plus; break;
    case IrBasisStrategy::FixedPlus: b = Basis::Plus; break;
    case IrBasisStrategy::FixedCross: b = Basis::Cross; break;
  }
  const auto m = quantum::measure(s, b, rng);

  EveRecord rec;
  rec.photon_index = photon_index;
  rec.strategy = EveStrategy::InterceptResend;
  rec.eve_basis = b;
  rec.measured_outcome = m.outcome;
  rec.inferred_bit_guess = m.outcome;
  return {m.collapsed, rec};
}

AttackOutcome utb_intercept(const Ketd& s, double theta, Basis attack_basis,
                            std::size_t photon_index) {
  EveRecord rec;
  rec.photon_index = photon_index;
  rec.strategy = EveStrategy::IndividualUtb;
  rec.eve_basis = attack_basis;
  rec.theta = theta;
  return {quantum::utb_apply(s, theta, attack_basis), rec};
}

void finish_utb_record(EveRecord& record, const Ketd& conditional_probe, RandomStream& rng) {
  record.probe_state = conditional_probe;
  record.probe_outcome = quantum::measure(conditional_probe, Basis::Plus, rng).outcome;
  record.inferred_bit_guess = *record.probe_outcome;
}

double observation_likelihood(const EveRecord& record, const Ketd& ciphertext) {
  if (record.strategy == EveStrategy::InterceptResend) {
    return quantum::born_probability(ciphertext, record.eve_basis, record.measured_outcome.value());
  }
  // Bob's measurement does not change the probe marginal, so it can be read
  // off the joint state directly.
  const JointKetd joint = quantum::utb_apply(ciphertext, record.theta, record.eve_basis);
  double p1 = 0;
  for (int photon = 0; photon < 2; ++photon) p1 += std::norm(joint(2 * photon + 1));
  return record.probe_outcome.value() ? p1 : 1.0 - p1;
}

std::vector<std::optional<Basis>> known_plaintext_infer(
    const std::vector<EveRecord>& records, const keystore::BitString& known_message,
    const std::vector<std::size_t>& public_sample_positions,
    const keystore::BitString& public_sample_bits, std::size_t n_photons) {
  if (public_sample_positions.size() != public_sample_bits.size())
    throw DomainError("public record positions and bits differ in length");

  // Eve's reconstruction of the modified message.
  std::vector<std::optional<Bit>> encoding(n_photons);
  for (std::size_t i = 0; i < public_sample_positions.size(); ++i) {
    const std::size_t p = public_sample_positions[i];
    if (p >= n_photons) throw DomainError("public sample position out of range");
    encoding[p] = public_sample_bits[i];
  }
  std::size_t next = 0;
  for (auto& e : encoding) {
    if (!e && next < known_message.size()) e = known_message[next++];
  }

  std::vector<std::optional<Basis>> guesses(n_photons);
  for (const EveRecord& rec : records) {
    if (rec.photon_index >= n_photons || !encoding[rec.photon_index]) continue;
    if (rec.strategy == EveStrategy::IndividualUtb && !rec.probe_outcome) continue;
    const auto op = quantum::encoding_for_bit(*encoding[rec.photon_index]);

    double like[2] = {0, 0};
    for (Bit b0 = 0; b0 < 2; ++b0) {
      for (Bit b1 = 0; b1 < 2; ++b1) {
        const quantum::BasisKeyPair key(b0, b1);
        const Ketd c = quantum::apply_encoding(op, quantum::state_from_basis_key(key));
        like[static_cast<int>(key.basis())] += observation_likelihood(rec, c);
      }
    }
    const int own = static_cast<int>(rec.eve_basis);
    const int rival = 1 - own;
    guesses[rec.photon_index] =
        like[rival] > like[own] + 1e-12 ? static_cast<Basis>(rival) : rec.eve_basis;
  }
  return guesses;
}

}  // namespace rotp::adversary
