#include "authentigpt/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <unordered_set>

#include "authentigpt/hash.hpp"
#include "authentigpt/masking.hpp"

namespace authentigpt {

// --- perplexity -------------------------------------------------------------

void TokenLogProbs::validate() const {
  if (tokens.size() != log_probs.size()) {
    throw LengthMismatchError("tokens and log_probs differ in length");
  }
  for (double lp : log_probs) {
    if (!std::isfinite(lp)) {
      throw DataError("log-probabilities must be finite");
    }
    if (lp > 0.0) {
      throw DataError("log-probabilities must be <= 0, got " + std::to_string(lp));
    }
  }
}

double perplexity(const TokenLogProbs& lp) {
  lp.validate();
  if (lp.log_probs.empty()) {
    throw EmptySequenceError("perplexity of an empty token sequence");
  }
  double sum = 0.0;
  for (double value : lp.log_probs) sum += value;
  return std::exp(-sum / static_cast<double>(lp.log_probs.size()));
}

TokenLogProbs token_log_probs_from_json(const json& value) {
  TokenLogProbs lp;
  try {
    lp.tokens = value.at("tokens").get<std::vector<std::string>>();
    lp.log_probs = value.at("log_probs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad token log-prob record: ") + e.what());
  }
  lp.validate();
  return lp;
}

// --- n-gram score -------------------------------------------------------------

void NGramSpec::validate() const {
  if (min_n < 1) throw ConfigError("n-gram order n0 must be >= 1");
  if (max_n < min_n) throw ConfigError("n-gram order N must be >= n0");
  if (repetitions < 1) throw ConfigError("sampling repetitions K must be >= 1");
  if (!weight) throw ConfigError("n-gram weight function must be set");
}

namespace {

// Distinct word n-grams of order n, each encoded as words joined by an
// unlikely separator byte.
std::unordered_set<std::string> ngram_set(const std::vector<std::string>& words,
                                          int n) {
  std::unordered_set<std::string> grams;
  if (static_cast<int>(words.size()) < n) return grams;
  for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= words.size();
       ++start) {
    std::string gram;
    for (int k = 0; k < n; ++k) {
      if (k > 0) gram.push_back('\x1f');
      gram += words[start + static_cast<std::size_t>(k)];
    }
    grams.insert(std::move(gram));
  }
  return grams;
}

}  // namespace

double bscore(const std::string& s2, std::span<const std::string> continuations,
              const NGramSpec& spec) {
  spec.validate();
  if (static_cast<int>(continuations.size()) != spec.repetitions) {
    throw LengthMismatchError("expected K=" + std::to_string(spec.repetitions) +
                              " continuations, got " +
                              std::to_string(continuations.size()));
  }
  const std::vector<std::string> s2_words = split_words(s2);
  if (s2_words.empty()) throw EmptyTextError("S2 has no words");

  // n-gram sets of S2 are continuation-independent.
  std::vector<std::unordered_set<std::string>> s2_grams;
  s2_grams.reserve(static_cast<std::size_t>(spec.max_n - spec.min_n + 1));
  for (int n = spec.min_n; n <= spec.max_n; ++n) {
    s2_grams.push_back(ngram_set(s2_words, n));
  }

  double total = 0.0;
  for (const std::string& continuation : continuations) {
    const std::vector<std::string> words = split_words(continuation);
    if (words.empty()) {
      throw EmptyContinuationError("continuation has no words");
    }
    const double word_count = static_cast<double>(words.size());
    for (int n = spec.min_n; n <= spec.max_n; ++n) {
      const auto& reference = s2_grams[static_cast<std::size_t>(n - spec.min_n)];
      if (reference.empty()) continue;  // zero n-grams in S2 contribute 0
      const auto grams = ngram_set(words, n);
      std::size_t shared = 0;
      for (const std::string& gram : grams) {
        if (reference.contains(gram)) ++shared;
      }
      total += spec.weight(n) * static_cast<double>(shared) /
               (word_count * static_cast<double>(reference.size()));
    }
  }
  return total / static_cast<double>(spec.repetitions);
}

SplitText split_for_bscore(const std::string& text, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw InvalidRatioError("tail fraction must be in (0,1)");
  }
  const std::vector<WordSpan> spans = word_spans(text);
  if (spans.size() < 2) {
    throw EmptyTextError("text too short to split for the n-gram baseline");
  }
  // S2 takes the trailing ceil-free share; at least one word on each side.
  std::size_t tail_words = static_cast<std::size_t>(
      std::llround(tail_fraction * static_cast<double>(spans.size())));
  tail_words = std::min(std::max<std::size_t>(tail_words, 1), spans.size() - 1);
  const std::size_t split_word = spans.size() - tail_words;

  const std::size_t s1_end = spans[split_word - 1].end;
  const std::size_t s2_begin = spans[split_word].begin;
  return SplitText{text.substr(0, s1_end), text.substr(s2_begin)};
}

std::string continuation_prompt(const std::string& s1) {
  return "Continue the following text in the same style. Return only the "
         "continuation, with no commentary.\n\nTEXT:\n" +
         s1;
}

std::vector<std::string> sample_continuations(const std::string& s1, int k,
                                              ChatCompleter& chat,
                                              std::uint64_t seed) {
  if (k < 1) throw ConfigError("need at least one continuation draw");
  const std::string prompt = continuation_prompt(s1);
  std::vector<std::string> draws;
  draws.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    draws.push_back(chat.complete(prompt, seed + static_cast<std::uint64_t>(i)));
  }
  return draws;
}

// --- zero-shot -------------------------------------------------------------------

std::string zero_shot_prompt(const std::string& text) {
  return "Does the following text appear to be machine-generated? Answer with "
         "a single word, yes or no.\n\nTEXT:\n" +
         text;
}

Label zero_shot_detect(const TextSample& sample, ChatCompleter& chat) {
  const std::string reply =
      chat.complete(zero_shot_prompt(sample.text), fnv1a64(sample.id));

  // First alphabetic word that reads yes/no, case-insensitively.
  std::string word;
  auto classify_word = [](const std::string& w) -> std::optional<Label> {
    if (w == "yes") return Label::machine;
    if (w == "no") return Label::human;
    return std::nullopt;
  };
  for (char c : reply) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!word.empty()) {
      if (auto verdict = classify_word(word)) return *verdict;
      word.clear();
    }
  }
  if (auto verdict = classify_word(word)) return *verdict;
  throw UnparseableVerdictError("zero-shot reply for sample '" + sample.id +
                                "' contains neither yes nor no: " + reply);
}

}  // namespace authentigpt
