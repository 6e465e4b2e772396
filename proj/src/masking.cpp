#include "authentigpt/masking.hpp"

#include <algorithm>
#include <cmath>

namespace authentigpt {

namespace {

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0:
    case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes the code point at offset i, advancing i past it. Invalid bytes are
// treated as one-byte non-space characters so malformed input still splits
// sensibly instead of throwing.
char32_t next_codepoint(std::string_view text, std::size_t& i) {
  unsigned char lead = static_cast<unsigned char>(text[i]);
  int extra = 0;
  char32_t cp = lead;
  if (lead < 0x80) {
    extra = 0;
  } else if ((lead >> 5) == 0x6) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead >> 4) == 0xE) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead >> 3) == 0x1E) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + static_cast<std::size_t>(extra) >= text.size()) {
    ++i;
    return 0xFFFD;  // truncated sequence
  }
  for (int k = 1; k <= extra; ++k) {
    unsigned char cont = static_cast<unsigned char>(text[i + k]);
    if ((cont >> 6) != 0x2) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  i += extra + 1;
  return cp;
}

}  // namespace

std::vector<WordSpan> word_spans(std::string_view text) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  bool in_word = false;
  std::size_t word_begin = 0;
  while (i < text.size()) {
    std::size_t cp_begin = i;
    char32_t cp = next_codepoint(text, i);
    if (is_unicode_space(cp)) {
      if (in_word) {
        spans.push_back({word_begin, cp_begin});
        in_word = false;
      }
    } else if (!in_word) {
      in_word = true;
      word_begin = cp_begin;
    }
  }
  if (in_word) {
    spans.push_back({word_begin, text.size()});
  }
  return spans;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  for (const WordSpan& span : word_spans(text)) {
    words.emplace_back(text.substr(span.begin, span.end - span.begin));
  }
  return words;
}

MaskedText mask_sentences(const TextSample& sample, double alpha,
                          std::uint64_t seed, const std::string& mask_token) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidRatioError("masking ratio must be in (0,1), got " +
                            std::to_string(alpha));
  }
  const std::vector<WordSpan> spans = word_spans(sample.text);
  if (spans.empty()) {
    throw EmptyTextError("sample '" + sample.id + "' has no word tokens");
  }

  const int word_count = static_cast<int>(spans.size());
  const int mask_count = std::max(
      1, static_cast<int>(std::llround(alpha * static_cast<double>(word_count))));

  // Partial Fisher-Yates: the first mask_count slots end up holding a uniform
  // sample without replacement.
  std::vector<int> order(spans.size());
  for (int i = 0; i < word_count; ++i) order[i] = i;
  SplitMix64 rng(seed);
  for (int i = 0; i < mask_count; ++i) {
    const int j =
        i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(word_count - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<int> positions(order.begin(), order.begin() + mask_count);
  std::sort(positions.begin(), positions.end());

  std::string masked;
  masked.reserve(sample.text.size() + positions.size() * mask_token.size());
  std::size_t cursor = 0;
  for (int pos : positions) {
    const WordSpan& span = spans[static_cast<std::size_t>(pos)];
    masked.append(sample.text, cursor, span.begin - cursor);
    masked.append(mask_token);
    cursor = span.end;
  }
  masked.append(sample.text, cursor, sample.text.size() - cursor);

  return MaskedText{std::move(masked), std::move(positions), word_count};
}

}  // namespace authentigpt
