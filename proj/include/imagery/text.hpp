#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace imagery {

// Canonical entity-key form: lowercase ASCII, internal whitespace collapsed
// to single spaces, leading/trailing whitespace trimmed.
std::string normalize_text(std::string_view text);

// FNV-1a, 64-bit. Fixed constants so toy embeddings are stable everywhere.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace imagery
