#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kaping {

// Bytes >= 0x80 count as alphanumeric so UTF-8 words stay intact.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Lowercase, map every non-alphanumeric byte to a space, collapse runs of
// spaces and trim.
std::string normalize_text(std::string_view s);

// Lowercased alphanumeric runs, in order of appearance.
std::vector<std::string> word_tokens(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes);

// Whitespace-delimited token count; the default prompt budget counter.
std::size_t whitespace_token_count(std::string_view s);

}  // namespace kaping
