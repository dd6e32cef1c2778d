#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "rotp/quantum.hpp"
#include "rotp/random.hpp"

namespace rotp::keystore {

using BitString = std::vector<Bit>;

/// Classical one-time pad with its publication ledger.
///
/// `origin` maps each current bit back to its index in the generation-0
/// pad of the lineage; it survives recycling and is what the reuse audit
/// inspects. It is not part of the secret and is not exported to pad files.
struct PadKey {
  BitString bits;
  std::set<std::size_t> published;
  std::uint64_t generation = 0;
  std::vector<std::size_t> origin;

  std::size_t size() const { return bits.size(); }

  /// Fresh lineage: origin[i] = i, nothing published.
  static PadKey from_bits(BitString bits, std::uint64_t generation = 0);
};

struct BasisKeySequence {
  std::vector<quantum::BasisKeyPair> pairs;
  /// Pad-bit indices (into the pad the sequence was drawn from) consumed by
  /// each pair.
  std::vector<std::array<std::size_t, 2>> source_indices;

  std::size_t size() const { return pairs.size(); }
};

enum class CheckOutcome { Passed, Failed };

/// Uniform random pad. Stand-in for a QKD-established key; see PadSource.
PadKey generate_pad(std::size_t length, RandomStream& rng);

/// The first 2 * n_photons pad bits grouped into consecutive pairs. Does not
/// touch the pad.
BasisKeySequence draw_basis_keys(const PadKey& pad, std::size_t n_photons);

/// Pad for the next session: drops both source bits of every announced
/// photon and every index already in `pad.published`, keeps survivor order, bumps the generation and clears the
/// publication ledger. Throws ProtocolViolation if the check failed.
PadKey recycle_pad(const PadKey& pad, const std::set<std::size_t>& announced_pair_indices,
                   const BasisKeySequence& keys, CheckOutcome check);

/// Seam for Step-1 key establishment. The built-in source is a trusted
/// shared RNG; a real QKD link would implement this instead.
class PadSource {
 public:
  virtual ~PadSource() = default;
  virtual PadKey establish(std::size_t length) = 0;
};

class TrustedRngPadSource final : public PadSource {
 public:
  explicit TrustedRngPadSource(std::uint64_t seed) : rng_(seed) {}
  PadKey establish(std::size_t length) override { return generate_pad(length, rng_); }

 private:
  RandomStream rng_;
};

/// Hex with the most significant bit of the first digit at pad index 0; a
/// trailing partial nibble is zero-padded.
std::string bits_to_hex(const BitString& bits);
/// Inverse of bits_to_hex; `n_bits` truncates (defaults to 4 * digits).
BitString hex_to_bits(const std::string& hex, std::size_t n_bits);
BitString hex_to_bits(const std::string& hex);

/// Pad file:
///   generation=<int>
///   <hex bits>
///   length=<int>        (optional; omitted when length is a multiple of 4)
std::string format_pad_file(const PadKey& pad);
PadKey parse_pad_file(const std::string& text);
void save_pad(const PadKey& pad, const std::filesystem::path& path);
PadKey load_pad(const std::filesystem::path& path);

}  // namespace rotp::keystore
