#include "thematic/utf8.hpp"

#include <cstdint>

namespace thematic::utf8 {

namespace {

// Expected continuation range for the byte after a lead byte. Later
// continuation bytes always use 80..BF.
struct LeadInfo {
  int length;
  std::uint8_t second_lo;
  std::uint8_t second_hi;
};

LeadInfo classify(std::uint8_t b) {
  if (b <= 0x7F) return {1, 0, 0};
  if (b >= 0xC2 && b <= 0xDF) return {2, 0x80, 0xBF};
  if (b == 0xE0) return {3, 0xA0, 0xBF};
  if ((b >= 0xE1 && b <= 0xEC) || b == 0xEE || b == 0xEF) return {3, 0x80, 0xBF};
  if (b == 0xED) return {3, 0x80, 0x9F};
  if (b == 0xF0) return {4, 0x90, 0xBF};
  if (b >= 0xF1 && b <= 0xF3) return {4, 0x80, 0xBF};
  if (b == 0xF4) return {4, 0x80, 0x8F};
  return {0, 0, 0};
}

}  // namespace

Decoded decode(std::string_view bytes) {
  Decoded out;
  out.text.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto lead = static_cast<std::uint8_t>(bytes[i]);
    const LeadInfo info = classify(lead);
    if (info.length == 1) {
      out.text.push_back(lead);
      ++i;
      continue;
    }
    if (info.length == 0) {
      out.text.push_back(kReplacement);
      ++out.invalid_sequences;
      ++i;
      continue;
    }
    char32_t cp = lead & (0xFF >> (info.length + 1));
    std::size_t consumed = 1;
    bool ok = true;
    for (int k = 1; k < info.length; ++k) {
      if (i + consumed >= n) {
        ok = false;
        break;
      }
      const auto b = static_cast<std::uint8_t>(bytes[i + consumed]);
      const std::uint8_t lo = k == 1 ? info.second_lo : 0x80;
      const std::uint8_t hi = k == 1 ? info.second_hi : 0xBF;
      if (b < lo || b > hi) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
      ++consumed;
    }
    if (ok) {
      out.text.push_back(cp);
    } else {
      out.text.push_back(kReplacement);
      ++out.invalid_sequences;
    }
    i += consumed;
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append(out, cp);
  return out;
}

std::size_t count_code_points(std::string_view valid_utf8) {
  std::size_t count = 0;
  for (char c : valid_utf8) {
    if ((static_cast<std::uint8_t>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

}  // namespace thematic::utf8
