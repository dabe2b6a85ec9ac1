#include "thematic/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "thematic/error.hpp"
#include "thematic/utf8.hpp"

namespace thematic {

namespace {

constexpr char32_t kBom = 0xFEFF;

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\v' || c == U'\f' || c == 0xA0 ||
         c == 0x3000 || (c >= 0x2000 && c <= 0x200A);
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c < 0xC0 || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  return c != utf8::kReplacement && c != kBom;
}

std::size_t count_lines(std::u32string_view text) {
  if (text.empty()) return 0;
  auto lf = static_cast<std::size_t>(std::count(text.begin(), text.end(), U'\n'));
  return text.back() == U'\n' ? lf : lf + 1;
}

// Finds the largest split point p in (lo, hi] satisfying `accept`.
template <typename Pred>
std::optional<std::size_t> last_split(std::size_t lo, std::size_t hi, Pred accept) {
  for (std::size_t p = hi; p > lo; --p) {
    if (accept(p)) return p;
  }
  return std::nullopt;
}

std::size_t choose_split(std::u32string_view t, std::size_t lo, std::size_t hi) {
  auto paragraph = [&](std::size_t p) { return p >= 2 && t[p - 1] == U'\n' && t[p - 2] == U'\n'; };
  auto sentence = [&](std::size_t p) {
    return p >= 2 && is_space(t[p - 1]) &&
           (t[p - 2] == U'.' || t[p - 2] == U'!' || t[p - 2] == U'?');
  };
  auto whitespace = [&](std::size_t p) { return p >= 1 && is_space(t[p - 1]); };

  if (auto p = last_split(lo, hi, paragraph)) return *p;
  if (auto p = last_split(lo, hi, sentence)) return *p;
  if (auto p = last_split(lo, hi, whitespace)) return *p;
  return hi;
}

// Parses a timestamp token starting at i; returns its length or 0.
std::size_t match_timestamp(std::u32string_view t, std::size_t i) {
  if (i >= t.size() || (t[i] != U'[' && t[i] != U'(')) return 0;
  const bool bracket = t[i] == U'[';
  std::size_t j = i + 1;
  std::size_t digits = 0;
  while (j < t.size() && is_digit(t[j]) && digits < 2) {
    ++j;
    ++digits;
  }
  if (digits == 0) return 0;
  auto two_digit_group = [&](std::size_t at) {
    return at + 2 < t.size() && t[at] == U':' && is_digit(t[at + 1]) && is_digit(t[at + 2]);
  };
  if (!two_digit_group(j)) return 0;
  j += 3;
  if (bracket && two_digit_group(j)) j += 3;
  const char32_t close = bracket ? U']' : U')';
  if (j >= t.size() || t[j] != close) return 0;
  return j + 1 - i;
}

std::optional<std::u32string> match_speaker(std::u32string_view t, std::size_t line_start) {
  std::size_t i = line_start;
  auto skip_blanks = [&] {
    while (i < t.size() && (t[i] == U' ' || t[i] == U'\t')) ++i;
  };
  skip_blanks();
  if (std::size_t len = match_timestamp(t, i)) {
    i += len;
    skip_blanks();
  }
  const std::size_t label_start = i;
  while (i < t.size() && (is_letter(t[i]) || t[i] == U' ')) ++i;
  if (i >= t.size() || t[i] != U':') return std::nullopt;
  const std::size_t colon = i;
  const std::size_t after = colon + 1;
  if (after < t.size() && !is_space(t[after])) return std::nullopt;

  std::size_t label_end = colon;
  while (label_end > label_start && t[label_end - 1] == U' ') --label_end;
  const std::size_t len = label_end - label_start;
  if (len == 0 || len > 40 || !is_letter(t[label_start])) return std::nullopt;
  return std::u32string(t.substr(label_start, len));
}

}  // namespace

std::size_t overlap_length(std::size_t max_chunk_chars, double overlap_fraction) {
  return static_cast<std::size_t>(
      std::floor(overlap_fraction * static_cast<double>(max_chunk_chars) + 1e-9));
}

TranscriptDocument normalize_text(std::string_view raw) {
  if (raw.empty()) throw EmptyInput();
  utf8::Decoded decoded = utf8::decode(raw);

  std::u32string text;
  text.reserve(decoded.text.size());
  const std::u32string& in = decoded.text;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char32_t c = in[i];
    if (c == kBom) continue;
    if (c == U'\r') {
      text.push_back(U'\n');
      if (i + 1 < in.size() && in[i + 1] == U'\n') ++i;
      continue;
    }
    text.push_back(c);
  }
  if (text.empty()) throw EmptyInput();

  TranscriptDocument doc;
  doc.char_count = text.size();
  doc.line_count = count_lines(text);
  doc.invalid_sequences = decoded.invalid_sequences;
  doc.text = utf8::encode(text);
  return doc;
}

TranscriptDocument chunk_document(TranscriptDocument doc, std::size_t max_chunk_chars,
                                  double overlap_fraction) {
  if (max_chunk_chars < kMinChunkChars) {
    throw InvalidArgument("max_chunk_chars must be at least " + std::to_string(kMinChunkChars));
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.5)) {
    throw InvalidArgument("overlap_fraction must lie in [0, 0.5]");
  }

  const std::u32string text = utf8::decode(doc.text).text;
  const std::size_t n = text.size();
  const std::size_t overlap = overlap_length(max_chunk_chars, overlap_fraction);

  doc.chunks.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t index = doc.chunks.size();
    if (n - start <= max_chunk_chars) {
      doc.chunks.push_back({index, start, n, utf8::encode(std::u32string_view(text).substr(start))});
      break;
    }
    const std::size_t end = choose_split(text, start + overlap, start + max_chunk_chars);
    doc.chunks.push_back(
        {index, start, end, utf8::encode(std::u32string_view(text).substr(start, end - start))});
    start = end - overlap;
  }
  return doc;
}

TranscriptMetadata extract_metadata(const TranscriptDocument& doc) {
  const std::u32string text = utf8::decode(doc.text).text;
  TranscriptMetadata meta;

  std::vector<std::u32string> seen;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i != 0 && text[i - 1] != U'\n') continue;
    if (i == text.size()) break;
    if (auto label = match_speaker(text, i)) {
      if (std::find(seen.begin(), seen.end(), *label) == seen.end()) {
        seen.push_back(*label);
        meta.speakers.push_back(utf8::encode(*label));
      }
    }
  }

  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::size_t len = match_timestamp(text, i)) {
      meta.timestamps.push_back({i, utf8::encode(std::u32string_view(text).substr(i, len))});
      i += len - 1;
    }
  }
  return meta;
}

TranscriptDocument prepare_transcript(std::string_view raw) {
  TranscriptDocument doc = normalize_text(raw);
  doc.metadata = extract_metadata(doc);
  return doc;
}

TranscriptDocument load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open transcript: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return prepare_transcript(buf.str());
}

}  // namespace thematic
