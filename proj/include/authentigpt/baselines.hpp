#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "authentigpt/core.hpp"
#include "authentigpt/providers.hpp"

namespace authentigpt {

// ---------------------------------------------------------------------------
// Perplexity
// ---------------------------------------------------------------------------

struct TokenLogProbs {
  std::vector<std::string> tokens;
  std::vector<double> log_probs;  // natural log, each <= 0

  void validate() const;
};

// exp of the negative mean token log-likelihood. Depends only on the multiset
// of log-probs. Throws EmptySequenceError.
double perplexity(const TokenLogProbs& lp);

// JSONL line: { "tokens": [...], "log_probs": [...] }
TokenLogProbs token_log_probs_from_json(const json& value);

// ---------------------------------------------------------------------------
// Divergent n-gram score
// ---------------------------------------------------------------------------

struct NGramSpec {
  int min_n = 1;       // n0
  int max_n = 1;       // N
  int repetitions = 1; // K
  std::function<double(int)> weight = [](int) { return 1.0; };

  void validate() const;
};

// (1/K) sum_k sum_{n=n0}^{N} f(n) * |ngrams_n(S'_k) cap ngrams_n(S2)|
//                               / (|S'_k| * |ngrams_n(S2)|)
// with word-level n-gram *sets*, |S'_k| the continuation's word count, and a
// zero-n-gram term contributing 0. Throws EmptyContinuationError,
// LengthMismatchError (|continuations| != K), EmptyTextError (S2 empty).
double bscore(const std::string& s2, std::span<const std::string> continuations,
              const NGramSpec& spec);

// Splits a text for the n-gram baseline: S1 = leading words, S2 = trailing
// words. tail_fraction is the share of words (by count) that goes to S2;
// the default keeps the second half.
struct SplitText {
  std::string s1;
  std::string s2;
};
SplitText split_for_bscore(const std::string& text, double tail_fraction = 0.5);

// Prompt used to sample the S'_k continuations from the chat provider.
std::string continuation_prompt(const std::string& s1);

// K continuation draws for one context; draw k salts the cache key so the
// provider can return distinct samples.
std::vector<std::string> sample_continuations(const std::string& s1, int k,
                                              ChatCompleter& chat,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Zero-shot prompting
// ---------------------------------------------------------------------------

std::string zero_shot_prompt(const std::string& text);

// Sends the fixed yes/no prompt and parses the first case-insensitive
// "yes"/"no" word of the reply: yes -> machine, no -> human. Throws
// UnparseableVerdictError when the reply contains neither.
Label zero_shot_detect(const TextSample& sample, ChatCompleter& chat);

}  // namespace authentigpt
