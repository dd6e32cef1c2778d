#include "rotp/keystore.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace rotp::keystore {

PadKey PadKey::from_bits(BitString bits, std::uint64_t generation) {
  PadKey pad;
  pad.origin.resize(bits.size());
  std::iota(pad.origin.begin(), pad.origin.end(), std::size_t{0});
  pad.bits = std::move(bits);
  pad.generation = generation;
  return pad;
}

PadKey generate_pad(std::size_t length, RandomStream& rng) {
  if (length == 0) throw DomainError("pad length must be positive");
  BitString bits(length);
  for (auto& b : bits) b = rng.bit() ? 1 : 0;
  return PadKey::from_bits(std::move(bits));
}

BasisKeySequence draw_basis_keys(const PadKey& pad, std::size_t n_photons) {
  if (pad.size() < 2 * n_photons) {
    throw PadExhausted("pad exhausted: need " + std::to_string(2 * n_photons) +
                       " bits, have " + std::to_string(pad.size()));
  }
  BasisKeySequence keys;
  keys.pairs.reserve(n_photons);
  keys.source_indices.reserve(n_photons);
  for (std::size_t i = 0; i < n_photons; ++i) {
    keys.pairs.emplace_back(pad.bits[2 * i], pad.bits[2 * i + 1]);
    keys.source_indices.push_back({2 * i, 2 * i + 1});
  }
  return keys;
}

PadKey recycle_pad(const PadKey& pad, const std::set<std::size_t>& announced_pair_indices,
                   const BasisKeySequence& keys, CheckOutcome check) {
  if (check != CheckOutcome::Passed)
    throw ProtocolViolation("refusing to recycle a pad after a failed eavesdropping check");

  std::vector<bool> drop(pad.size(), false);
  for (std::size_t photon : announced_pair_indices) {
    if (photon >= keys.size())
      throw DomainError("announced photon index " + std::to_string(photon) + " out of range");
    for (std::size_t idx : keys.source_indices[photon]) {
      if (idx >= pad.size()) throw DomainError("basis-key source index outside pad");
      drop[idx] = true;
    }
  }
  for (std::size_t idx : pad.published) {
    if (idx >= pad.size()) throw DomainError("published index outside pad");
    drop[idx] = true;
  }

  PadKey next;
  next.generation = pad.generation + 1;
  for (std::size_t i = 0; i < pad.size(); ++i) {
    if (drop[i]) continue;
    next.bits.push_back(pad.bits[i]);
    next.origin.push_back(i < pad.origin.size() ? pad.origin[i] : i);
  }
  return next;
}

std::string bits_to_hex(const BitString& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size()) nibble |= bits[i + j] & 1u;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

BitString hex_to_bits(const std::string& hex, std::size_t n_bits) {
  if (n_bits > 4 * hex.size()) throw DomainError("hex string shorter than declared length");
  BitString bits;
  bits.reserve(4 * hex.size());
  for (char ch : hex) {
    unsigned v;
    if (ch >= '0' && ch <= '9') {
      v = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'a' && ch <= 'f') {
      v = static_cast<unsigned>(ch - 'a' + 10);
    } else if (ch >= 'A' && ch <= 'F') {
      v = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw DomainError(std::string("invalid hex digit '") + ch + "'");
    }
    for (int j = 3; j >= 0; --j) bits.push_back(static_cast<Bit>((v >> j) & 1u));
  }
  bits.resize(n_bits);
  return bits;
}

BitString hex_to_bits(const std::string& hex) { return hex_to_bits(hex, 4 * hex.size()); }

std::string format_pad_file(const PadKey& pad) {
  std::ostringstream os;
  os << "generation=" << pad.generation << '\n' << bits_to_hex(pad.bits) << '\n';
  if (pad.size() % 4 != 0) os << "length=" << pad.size() << '\n';
  return os.str();
}

namespace {

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = s.find_first_not_of(" \t");
  return start == std::string::npos ? std::string{} : s.substr(start);
}

std::uint64_t parse_field(const std::string& line, const std::string& key) {
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) throw ConfigError("pad file: expected '" + prefix + "...'");
  const std::string value = line.substr(prefix.size());
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("pad file: '" + key + "' is not a non-negative integer");
  return std::stoull(value);
}

}  // namespace

PadKey parse_pad_file(const std::string& text) {
  std::istringstream is(text);
  std::string gen_line, hex_line, len_line;
  if (!std::getline(is, gen_line) || !std::getline(is, hex_line))
    throw ConfigError("pad file: need a generation line and a hex line");
  const std::uint64_t generation = parse_field(strip(gen_line), "generation");
  const std::string hex = strip(hex_line);
  std::size_t n_bits = 4 * hex.size();
  if (std::getline(is, len_line) && !strip(len_line).empty())
    n_bits = parse_field(strip(len_line), "length");
  try {
    return PadKey::from_bits(hex_to_bits(hex, n_bits), generation);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("pad file: ") + e.what());
  }
}

void save_pad(const PadKey& pad, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write pad file " + path.string());
  os << format_pad_file(pad);
}

PadKey load_pad(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read pad file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_pad_file(buf.str());
}

}  // namespace rotp::keystore
