#include "rotp/transcript_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rotp::io {

using nlohmann::json;

std::string bits_to_string(const keystore::BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (Bit b : bits) s.push_back(b ? '1' : '0');
  return s;
}

keystore::BitString string_to_bits(const std::string& s) {
  keystore::BitString bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw DomainError(std::string("not a bit: '") + c + "'");
    bits.push_back(c == '1');
  }
  return bits;
}

std::string sha256_digest(const keystore::BitString& bits) {
  const std::string text = bits_to_string(bits);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

json ket_json(const quantum::Ketd& k) {
  json out = json::array();
  for (int i = 0; i < 2; ++i) out.push_back({k(i).real(), k(i).imag()});
  return out;
}

json attack_json(const adversary::AttackModel& a) {
  json j;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, adversary::NoAttack>) {
          j["attack"] = "none";
        } else if constexpr (std::is_same_v<T, adversary::InterceptResend>) {
          j["attack"] = "intercept_resend";
          j["ir_basis"] = m.strategy == adversary::IrBasisStrategy::RandomMB    ? "random"
                          : m.strategy == adversary::IrBasisStrategy::FixedPlus ? "plus"
                                                                                : "cross";
        } else {
          j["attack"] = "utb";
          j["theta"] = m.theta;
          j["utb_basis"] = quantum::to_string(m.attack_basis);
        }
      },
      a.channel);
  j["known_plaintext"] = a.known_message.has_value();
  return j;
}

json eve_json(const adversary::EveRecord& r) {
  json j;
  j["photon_index"] = r.photon_index;
  j["strategy"] =
      r.strategy == adversary::EveStrategy::InterceptResend ? "intercept_resend" : "utb";
  j["eve_basis"] = quantum::to_string(r.eve_basis);
  if (r.strategy == adversary::EveStrategy::IndividualUtb) j["theta"] = r.theta;
  if (r.measured_outcome) j["measured_outcome"] = *r.measured_outcome;
  if (r.probe_state) j["probe_state"] = ket_json(*r.probe_state);
  if (r.probe_outcome) j["probe_outcome"] = *r.probe_outcome;
  if (r.inferred_bit_guess) j["inferred_bit_guess"] = *r.inferred_bit_guess;
  if (r.inferred_basis_guess) j["inferred_basis_guess"] = quantum::to_string(*r.inferred_basis_guess);
  return j;
}

}  // namespace

json public_view(const protocol::SessionTranscript& t) {
  json j;
  j["sample_positions"] = t.public_record.sample_positions;
  json bits = json::array();
  for (Bit b : t.public_record.announced_bits) bits.push_back(static_cast<int>(b));
  j["announced_bits"] = bits;
  return j;
}

json transcript_to_json(const protocol::SessionTranscript& t, bool reveal) {
  json j;
  j["schema"] = kTranscriptSchema;
  j["config"] = {{"n_message", t.config.n_message},
                 {"n_sample", t.config.n_sample},
                 {"abort_threshold", t.config.abort_threshold},
                 {"seed", t.config.seed},
                 {"insecure_demo", t.config.insecure_demo}};
  j["attack"] = attack_json(t.attack);
  j["pad"] = {{"length", t.pad_length}, {"generation", t.pad_generation}};
  j["public"] = public_view(t);
  j["error_report"] = {{"n_checked", t.error_report.n_checked},
                       {"n_errors", t.error_report.n_errors},
                       {"rate", t.error_report.rate},
                       {"accepted", t.error_report.accepted}};

  json photons = json::array();
  for (const auto& p : t.photons) {
    photons.push_back({{"index", p.index},
                       {"basis_key", std::string{char('0' + p.basis_key.b0), char('0' + p.basis_key.b1)}},
                       {"prepared", ket_json(p.prepared)},
                       {"encoding", p.encoding == quantum::EncodingOp::U0 ? "U0" : "U1"},
                       {"ciphertext", ket_json(p.ciphertext)},
                       {"received_outcome", p.received_outcome},
                       {"decoded_bit", p.decoded_bit},
                       {"is_sample", p.is_sample}});
  }
  json events = json::array();
  for (const auto& r : t.attack_events) events.push_back(eve_json(r));
  j["secret"] = {{"photons", std::move(photons)}, {"attack_events", std::move(events)}};

  if (t.recycled_pad) {
    j["recycled_pad"] = {{"generation", t.recycled_pad->generation},
                         {"length", t.recycled_pad->size()},
                         {"hex", keystore::bits_to_hex(t.recycled_pad->bits)}};
  } else {
    j["recycled_pad"] = nullptr;
  }
  if (t.extracted_message) {
    j["extracted_message_digest"] = sha256_digest(*t.extracted_message);
    if (reveal) j["extracted_message"] = bits_to_string(*t.extracted_message);
  } else {
    j["extracted_message_digest"] = nullptr;
  }
  return j;
}

void write_photon_csv(std::ostream& os, const protocol::SessionTranscript& t) {
  os << "index,basis_key,basis,encoding,received_outcome,decoded_bit,is_sample\n";
  for (const auto& p : t.photons) {
    os << p.index << ',' << int(p.basis_key.b0) << int(p.basis_key.b1) << ','
       << quantum::to_string(p.basis_key.basis()) << ','
       << (p.encoding == quantum::EncodingOp::U0 ? "U0" : "U1") << ',' << int(p.received_outcome)
       << ',' << int(p.decoded_bit) << ',' << (p.is_sample ? 1 : 0) << '\n';
  }
}

}  // namespace rotp::io
