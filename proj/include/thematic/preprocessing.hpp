#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thematic {

/// A timestamp found in the transcript. `offset` is a code-point index.
struct TimestampMark {
  std::size_t offset = 0;
  std::string stamp;

  bool operator==(const TimestampMark&) const = default;
};

struct TranscriptMetadata {
  std::vector<std::string> speakers;  // first-seen order, deduplicated
  std::vector<TimestampMark> timestamps;

  bool operator==(const TranscriptMetadata&) const = default;
};

/// A window of the document. `start`/`end` are code-point offsets, half open.
struct Chunk {
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  bool operator==(const Chunk&) const = default;
};

struct TranscriptDocument {
  std::string text;  // UTF-8, LF line endings, no BOM
  std::size_t char_count = 0;
  std::size_t line_count = 0;
  std::size_t invalid_sequences = 0;
  TranscriptMetadata metadata;
  std::vector<Chunk> chunks;
};

inline constexpr std::size_t kDefaultMaxChunkChars = 24000;
inline constexpr double kDefaultOverlapFraction = 0.20;
inline constexpr std::size_t kMinChunkChars = 200;

/// Decodes raw bytes as UTF-8 (invalid sequences become U+FFFD and are
/// counted), strips byte-order marks and converts CRLF/CR to LF.
/// Throws EmptyInput when nothing is left.
TranscriptDocument normalize_text(std::string_view raw);

/// Splits the document into overlapping chunks. Split points prefer a
/// paragraph break, then a sentence end, then whitespace, then the hard limit.
/// Consecutive chunks share exactly floor(overlap_fraction * max_chunk_chars)
/// code points.
TranscriptDocument chunk_document(TranscriptDocument doc,
                                  std::size_t max_chunk_chars = kDefaultMaxChunkChars,
                                  double overlap_fraction = kDefaultOverlapFraction);

TranscriptMetadata extract_metadata(const TranscriptDocument& doc);

std::size_t overlap_length(std::size_t max_chunk_chars, double overlap_fraction);

// Reads, normalizes and annotates a transcript file (chunks left empty).
TranscriptDocument load_transcript(const std::filesystem::path& path);
TranscriptDocument prepare_transcript(std::string_view raw);

}  // namespace thematic
