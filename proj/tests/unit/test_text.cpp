#include <doctest.h>

#include <random>

#include "thematic/preprocessing.hpp"
#include "thematic/prompt.hpp"
#include "thematic/utf8.hpp"

using namespace thematic;

namespace {

std::string bytes(std::initializer_list<unsigned> list) {
  std::string s;
  for (unsigned b : list) s.push_back(static_cast<char>(b));
  return s;
}

std::u32string decoded(std::initializer_list<unsigned> list) { return utf8::decode(bytes(list)).text; }

}  // namespace

// Expected values were produced by CPython's bytes.decode("utf-8", "replace").
TEST_CASE("utf8 decode replaces maximal subparts") {
  const auto a = utf8::decode(bytes({0x68, 0xFF, 0x69}));
  CHECK(a.text == U"h�i");
  CHECK(a.invalid_sequences == 1);

  CHECK(decoded({0xE2, 0x82}) == U"�");
  CHECK(decoded({0xF0, 0x9F, 0x98}) == U"�");
  CHECK(decoded({0xED, 0xA0, 0x80}) == U"���");
  CHECK(decoded({0xC0, 0xAF}) == U"��");
  CHECK(decoded({0xF4, 0x90, 0x80, 0x80}) == U"����");
  CHECK(decoded({0x61, 0xE2, 0x82, 0x62}) == U"a�b");
  CHECK(decoded({0xE2, 0x82, 0xAC, 0x80}) == U"€�");
  CHECK(decoded({0xF0, 0x9F, 0x98, 0x80}) == U"\U0001F600");
}

TEST_CASE("utf8 round trip on random code points") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string s;
    for (int i = 0; i < 50; ++i) {
      char32_t cp = rng() % 0x110000;
      if (cp >= 0xD800 && cp <= 0xDFFF) cp = 'x';
      s.push_back(cp);
    }
    const std::string enc = utf8::encode(s);
    const auto back = utf8::decode(enc);
    REQUIRE(back.text == s);
    CHECK(back.invalid_sequences == 0);
    CHECK(utf8::count_code_points(enc) == s.size());
  }
}

TEST_CASE("normalize_text") {
  SUBCASE("line endings and byte-order marks") {
    const auto doc = normalize_text("\xEF\xBB\xBFline one\r\nline two\rline three\n");
    CHECK(doc.text == "line one\nline two\nline three\n");
    CHECK(doc.invalid_sequences == 0);
    CHECK(doc.char_count == 29);
  }
  SUBCASE("invalid bytes are counted") {
    const auto doc = normalize_text(bytes({'o', 'k', 0xFF, 0xFE}));
    CHECK(doc.invalid_sequences == 2);
    CHECK(doc.char_count == 4);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(normalize_text(""), EmptyInput);
    CHECK_THROWS_AS(normalize_text("\xEF\xBB\xBF"), EmptyInput);
  }
}

TEST_CASE("chunking invariants on random documents") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {"word ", "talk. ", "é ", "\n\n", "why? ", "no", "x", "🙂 ", "\n"};
  for (int trial = 0; trial < 60; ++trial) {
    std::string raw;
    const int len = 50 + static_cast<int>(rng() % 1500);
    for (int i = 0; i < len; ++i) raw += pieces[rng() % pieces.size()];
    const std::size_t max = 200 + rng() % 400;
    const double frac = static_cast<double>(rng() % 51) / 100.0;
    const auto doc = chunk_document(normalize_text(raw), max, frac);
    const std::u32string text = utf8::decode(doc.text).text;
    const std::size_t overlap = overlap_length(max, frac);

    REQUIRE_FALSE(doc.chunks.empty());
    CHECK(doc.chunks.front().start == 0);
    CHECK(doc.chunks.back().end == text.size());
    for (std::size_t i = 0; i < doc.chunks.size(); ++i) {
      const Chunk& c = doc.chunks[i];
      CHECK(c.index == i);
      CHECK(c.end - c.start <= max);
      CHECK(c.end > c.start);
      CHECK(utf8::decode(c.text).text == text.substr(c.start, c.end - c.start));
      if (i > 0) {
        CHECK(doc.chunks[i - 1].end - c.start == overlap);
        CHECK(c.start > doc.chunks[i - 1].start);
      }
    }
  }
}

TEST_CASE("chunk boundaries prefer paragraphs, then sentences") {
  std::string para(150, 'a');
  para += "\n\n";
  std::string text = para + std::string(300, 'b');
  auto doc = chunk_document(normalize_text(text), 200, 0.0);
  CHECK(doc.chunks[0].end == 152);

  std::string sentences = std::string(120, 'a') + ". " + std::string(40, 'c') + " " + std::string(300, 'd');
  doc = chunk_document(normalize_text(sentences), 200, 0.0);
  CHECK(doc.chunks[0].end == 122);

  doc = chunk_document(normalize_text(std::string(450, 'z')), 200, 0.1);
  CHECK(doc.chunks[0].end == 200);
  CHECK(doc.chunks[1].start == 180);
}

TEST_CASE("a short document is one chunk") {
  const auto doc = chunk_document(normalize_text("just a little text"));
  REQUIRE(doc.chunks.size() == 1);
  CHECK(doc.chunks[0].text == "just a little text");
}

TEST_CASE("chunking argument checks") {
  const auto doc = normalize_text("abc");
  CHECK_THROWS_AS(chunk_document(doc, 199, 0.2), InvalidArgument);
  CHECK_THROWS_AS(chunk_document(doc, 1000, 0.51), InvalidArgument);
  CHECK_THROWS_AS(chunk_document(doc, 1000, -0.1), InvalidArgument);
  CHECK(overlap_length(24000, 0.20) == 4800);
  CHECK(overlap_length(1000, 0.3) == 300);
}

TEST_CASE("speaker and timestamp metadata") {
  const auto doc = prepare_transcript(
      "[00:01] Interviewer: hello\n"
      "Participant A: hi there\n"
      "(12:30) Interviewer: again\n"
      "not a speaker line: because lowercase start? no\n"
      "http://example.com is not a label\n"
      "[1:02:03] Dr Smith:\n");
  CHECK(doc.metadata.speakers ==
        std::vector<std::string>{"Interviewer", "Participant A", "not a speaker line", "Dr Smith"});
  REQUIRE(doc.metadata.timestamps.size() == 3);
  CHECK(doc.metadata.timestamps[0] == TimestampMark{0, "[00:01]"});
  CHECK(doc.metadata.timestamps[1].stamp == "(12:30)");
  CHECK(doc.metadata.timestamps[2].stamp == "[1:02:03]");
}

TEST_CASE("prompt validation") {
  auto t = validate_template("Seed {seed}. Analyze {text_chunk} for {speaker}.");
  CHECK(t.has_seed_var);
  CHECK(t.text_var == TextVar::text_chunk);
  REQUIRE(t.warnings.size() == 1);
  CHECK(t.warnings[0].find("speaker") != std::string::npos);

  t = validate_template("Analyze: {text}");
  CHECK_FALSE(t.has_seed_var);
  CHECK(t.text_var == TextVar::text);
  CHECK(t.warnings.empty());

  CHECK_THROWS_AS(validate_template("Analyze {seed} only"), MissingTextPlaceholder);
  CHECK_THROWS_AS(validate_template(""), MissingTextPlaceholder);
}

TEST_CASE("rendering is a single pass") {
  const auto t = validate_template("run {seed}: {text_chunk} / {unknown}");
  CHECK(render_prompt(t, 42, "contains {seed} and {text_chunk}") ==
        "run 42: contains {seed} and {text_chunk} / {unknown}");
  const auto d = default_prompt();
  CHECK(d.text_var == TextVar::text_chunk);
  CHECK(d.has_seed_var);
  const std::string rendered = render_prompt(d, 1213, "TRANSCRIPT");
  CHECK(rendered.find("1213") != std::string::npos);
  CHECK(rendered.find("TRANSCRIPT") != std::string::npos);
  CHECK(rendered.find("majorEmotionalThemes") != std::string::npos);
}
