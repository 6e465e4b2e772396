#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "authentigpt/core.hpp"

namespace authentigpt {

// Byte range [begin, end) of one word inside the original text.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Words are maximal runs of non-whitespace; whitespace is the Unicode
// White_Space set. Punctuation stays attached to its word.
std::vector<WordSpan> word_spans(std::string_view text);

// Convenience wrapper returning the words themselves.
std::vector<std::string> split_words(std::string_view text);

struct MaskedText {
  std::string text;                  // original with masked words replaced
  std::vector<int> masked_positions; // sorted word indices
  int original_word_count = 0;
};

// Replaces max(1, round(alpha * word_count)) word positions, chosen uniformly
// without replacement from the seeded generator, with mask_token. Everything
// outside the replaced words (including whitespace runs) is preserved
// byte-for-byte. Deterministic for fixed (sample, alpha, seed).
//
// Throws EmptyTextError if the text has no words, InvalidRatioError if alpha
// is outside (0,1).
MaskedText mask_sentences(const TextSample& sample, double alpha,
                          std::uint64_t seed,
                          const std::string& mask_token = "<unk>");

}  // namespace authentigpt
