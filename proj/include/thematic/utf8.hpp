#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace thematic::utf8 {

inline constexpr char32_t kReplacement = U'�';

struct Decoded {
  std::u32string text;
  std::size_t invalid_sequences = 0;
};

// Lossy decode. Each maximal ill-formed subsequence becomes one U+FFFD,
// matching the Unicode "substitution of maximal subparts" practice.
Decoded decode(std::string_view bytes);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

std::size_t count_code_points(std::string_view valid_utf8);

}  // namespace thematic::utf8
