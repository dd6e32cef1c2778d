#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "rotp/protocol.hpp"

namespace rotp::io {

inline constexpr const char* kTranscriptSchema = "rotp.transcript/1";

/// "0101..." rendering of a bit string.
std::string bits_to_string(const keystore::BitString& bits);
keystore::BitString string_to_bits(const std::string& s);

/// SHA-256 (lowercase hex) of bits_to_string(bits).
std::string sha256_digest(const keystore::BitString& bits);

/// Exactly what crosses the classical channel: sample positions and Bob's
/// announced bits.
nlohmann::json public_view(const protocol::SessionTranscript& t);

/// Config, public view, error report, pad lineage, and (secret) per-photon
/// records plus Eve's records. The extracted message itself is included only
/// when `reveal` is set; its digest always is.
nlohmann::json transcript_to_json(const protocol::SessionTranscript& t, bool reveal = false);

/// One row per photon (secret view).
void write_photon_csv(std::ostream& os, const protocol::SessionTranscript& t);

}  // namespace rotp::io
