#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "authentigpt/masking.hpp"

using namespace authentigpt;

namespace {

TextSample sample_of(std::string text) {
  return TextSample{"t", std::move(text), std::nullopt, std::nullopt};
}

std::string repeated_words(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) {
    if (i > 0) text.push_back(' ');
    text += "word" + std::to_string(i);
  }
  return text;
}

int count_occurrences(const std::string& haystack, const std::string& needle) {
  int count = 0;
  std::size_t at = 0;
  while ((at = haystack.find(needle, at)) != std::string::npos) {
    ++count;
    at += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("five words at alpha 0.2 mask exactly one") {
  const MaskedText masked = mask_sentences(sample_of("a b c d e"), 0.2, 42);
  CHECK(masked.masked_positions.size() == 1);
  CHECK(masked.original_word_count == 5);
  CHECK(count_occurrences(masked.text, "<unk>") == 1);
  CHECK(split_words(masked.text).size() == 5);
}

TEST_CASE("a hundred words at alpha 0.08 mask exactly eight") {
  const MaskedText masked =
      mask_sentences(sample_of(repeated_words(100)), 0.08, 7);
  CHECK(masked.masked_positions.size() == 8);
  CHECK(count_occurrences(masked.text, "<unk>") == 8);
}

TEST_CASE("masking is deterministic per seed") {
  const TextSample sample = sample_of(repeated_words(30));
  const MaskedText a = mask_sentences(sample, 0.2, 123);
  const MaskedText b = mask_sentences(sample, 0.2, 123);
  CHECK(a.text == b.text);
  CHECK(a.masked_positions == b.masked_positions);
}

TEST_CASE("different seeds pick different positions almost always") {
  const TextSample sample = sample_of(repeated_words(50));
  int identical = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const MaskedText a = mask_sentences(sample, 0.08, 2 * seed);
    const MaskedText b = mask_sentences(sample, 0.08, 2 * seed + 1);
    if (a.masked_positions == b.masked_positions) ++identical;
  }
  // 4 of 50 positions: C(50,4) = 230300 possible sets, so collisions are rare
  CHECK(identical < 10);
}

TEST_CASE("masked count and word preservation hold over random triples") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(120));
    const double alpha = 0.02 + 0.9 * rng.uniform01();
    const TextSample sample = sample_of(repeated_words(n));
    const MaskedText masked = mask_sentences(sample, alpha, rng.next());

    const int expected = std::max(
        1, static_cast<int>(std::llround(alpha * static_cast<double>(n))));
    REQUIRE(static_cast<int>(masked.masked_positions.size()) == expected);

    // positions sorted, distinct, in range
    const std::set<int> unique(masked.masked_positions.begin(),
                               masked.masked_positions.end());
    REQUIRE(unique.size() == masked.masked_positions.size());
    REQUIRE(*unique.begin() >= 0);
    REQUIRE(*unique.rbegin() < n);

    // removing masked slots from both sides leaves identical word sequences
    const std::vector<std::string> original_words = split_words(sample.text);
    const std::vector<std::string> masked_words = split_words(masked.text);
    REQUIRE(masked_words.size() == original_words.size());
    for (int i = 0; i < n; ++i) {
      if (unique.contains(i)) {
        REQUIRE(masked_words[static_cast<std::size_t>(i)] == "<unk>");
      } else {
        REQUIRE(masked_words[static_cast<std::size_t>(i)] ==
                original_words[static_cast<std::size_t>(i)]);
      }
    }
  }
}

TEST_CASE("whitespace and punctuation outside masked words are untouched") {
  const TextSample sample = sample_of("alpha,  beta\tgamma.\n delta");
  const MaskedText masked = mask_sentences(sample, 0.25, 5);
  REQUIRE(masked.masked_positions.size() == 1);
  // Rebuild the expected string by hand from the chosen position.
  const std::vector<WordSpan> spans = word_spans(sample.text);
  const WordSpan& span =
      spans[static_cast<std::size_t>(masked.masked_positions[0])];
  std::string expected = sample.text.substr(0, span.begin);
  expected += "<unk>";
  expected += sample.text.substr(span.end);
  CHECK(masked.text == expected);
}

TEST_CASE("unicode whitespace splits words and multibyte words survive") {
  // U+00A0 no-break space and U+3000 ideographic space both separate words.
  const std::string text = "caf\xC3\xA9\xC2\xA0th\xC3\xA9\xE3\x80\x80gersemi";
  const std::vector<std::string> words = split_words(text);
  REQUIRE(words.size() == 3);
  CHECK(words[0] == "caf\xC3\xA9");
  CHECK(words[1] == "th\xC3\xA9");
  CHECK(words[2] == "gersemi");

  const MaskedText masked = mask_sentences(sample_of(text), 0.3, 9);
  CHECK(masked.masked_positions.size() == 1);
  CHECK(split_words(masked.text).size() == 3);
}

TEST_CASE("mask token is configurable and inserted verbatim") {
  const MaskedText masked = mask_sentences(sample_of("a b c"), 0.4, 1, "[MASK]");
  CHECK(count_occurrences(masked.text, "[MASK]") == 1);
  CHECK(masked.text.find("<unk>") == std::string::npos);
}

TEST_CASE("high alpha can mask every word") {
  const MaskedText masked = mask_sentences(sample_of(repeated_words(10)), 0.96, 3);
  CHECK(masked.masked_positions.size() == 10);
  CHECK(split_words(masked.text) ==
        std::vector<std::string>(10, "<unk>"));
}

TEST_CASE("masking rejects empty text and bad ratios") {
  CHECK_THROWS_AS(mask_sentences(sample_of(""), 0.1, 1), EmptyTextError);
  CHECK_THROWS_AS(mask_sentences(sample_of("   \t\n"), 0.1, 1), EmptyTextError);
  CHECK_THROWS_AS(mask_sentences(sample_of("a b"), 0.0, 1), InvalidRatioError);
  CHECK_THROWS_AS(mask_sentences(sample_of("a b"), 1.0, 1), InvalidRatioError);
  CHECK_THROWS_AS(mask_sentences(sample_of("a b"), -0.5, 1), InvalidRatioError);
}
