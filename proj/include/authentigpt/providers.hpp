#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "authentigpt/core.hpp"
#include "authentigpt/masking.hpp"

namespace authentigpt {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class ProviderKind { remote_chat, remote_embedding, mock_denoiser, mock_embedder };

std::string to_string(ProviderKind kind);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::mock_denoiser;
  std::string endpoint_url;    // remote kinds only
  std::string model_name;
  std::string credential_ref;  // name of the env var holding the secret
  double timeout_seconds = 30.0;
  int max_retries = 3;

  // Remote kinds require endpoint_url and credential_ref; mock kinds forbid
  // them. Throws ConfigError.
  void validate() const;

  // Stable identity string used in cache keys.
  std::string identity() const;
};

struct Embedding {
  std::vector<double> vector;

  int dimension() const { return static_cast<int>(vector.size()); }
  bool operator==(const Embedding&) const = default;
};

// ---------------------------------------------------------------------------
// Response cache (content-addressed, one file per key)
// ---------------------------------------------------------------------------

struct CacheKey {
  std::string digest;  // sha256 hex
};

// Digest of (provider identity, operation, canonicalized payload). The
// payload is canonicalized by nlohmann's sorted-key dump, so semantically
// identical requests share an entry.
CacheKey make_cache_key(std::string_view provider_identity,
                        std::string_view operation, const json& payload);

class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path directory);

  // On hit returns the stored response without invoking `call`; on miss
  // invokes, stores, returns. A corrupted entry (checksum mismatch,
  // unparseable file) falls through to the live call and is rewritten.
  std::string cached_call(const CacheKey& key, const json& request_echo,
                          const std::function<std::string()>& call);

  const std::filesystem::path& directory() const { return directory_; }
  int hits() const { return hits_.load(); }
  int misses() const { return misses_.load(); }

 private:
  std::filesystem::path entry_path(const CacheKey& key) const;
  std::mutex& mutex_for(const std::string& digest);

  std::filesystem::path directory_;
  std::mutex registry_mutex_;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
  std::atomic<int> hits_{0};
  std::atomic<int> misses_{0};
};

// Process-wide count of HTTP requests actually sent. Lets tests assert a run
// was fully offline.
std::uint64_t http_request_count();

// ---------------------------------------------------------------------------
// Provider interfaces
// ---------------------------------------------------------------------------

struct DenoiseRequest {
  MaskedText masked;
  std::string sample_id;
  int repetition = 1;
  std::uint64_t seed = 0;
  std::string mask_token = "<unk>";
};

class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::string denoise(const DenoiseRequest& request) = 0;
  virtual std::string identity() const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(const std::string& text) = 0;
  virtual std::string identity() const = 0;
};

// Low-level single-prompt chat completion. The denoising path, the zero-shot
// baseline, and continuation sampling all go through this. `cache_salt`
// participates in the cache key (and backoff jitter) but not in the HTTP
// payload, so repeated sampling of one prompt stays cacheable per draw.
class ChatCompleter {
 public:
  virtual ~ChatCompleter() = default;
  virtual std::string complete(const std::string& prompt,
                               std::uint64_t cache_salt) = 0;
  virtual std::string identity() const = 0;
};

// ---------------------------------------------------------------------------
// Remote providers (HTTP, JSON protocol)
// ---------------------------------------------------------------------------

// POST {"model", "messages": [single user message], "temperature"} to the
// configured endpoint; the reply text is choices[0].message.content. Credentials
// are read from the environment variable named by credential_ref at call time.
// Retries use exponential backoff with full jitter derived from the request
// seed. Errors carry the cache key digest for diagnosis.
class HttpChatCompleter : public ChatCompleter {
 public:
  HttpChatCompleter(ProviderConfig config, ResponseCache* cache,
                    double temperature = 0.0, int initial_backoff_ms = 500);

  std::string complete(const std::string& prompt, std::uint64_t cache_salt) override;
  std::string identity() const override;

 private:
  ProviderConfig config_;
  ResponseCache* cache_;  // optional; may be null
  double temperature_;
  int initial_backoff_ms_;
};

// Wraps a ChatCompleter with the fixed denoising instruction template and
// returns the model's message text verbatim, trimmed of leading/trailing
// whitespace.
class PromptDenoiser : public Denoiser {
 public:
  explicit PromptDenoiser(std::shared_ptr<ChatCompleter> chat);

  std::string denoise(const DenoiseRequest& request) override;
  std::string identity() const override;

 private:
  std::shared_ptr<ChatCompleter> chat_;
};

// The instruction wrapped around masked text before it is sent to the chat
// model. Kept in one place so docs and tests can quote it.
std::string denoise_prompt(const std::string& masked_text,
                           const std::string& mask_token);

// POST {"model", "input"}; the vector is data[0].embedding.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(ProviderConfig config, ResponseCache* cache,
               int initial_backoff_ms = 500);

  Embedding embed(const std::string& text) override;
  std::string identity() const override;

 private:
  ProviderConfig config_;
  ResponseCache* cache_;
  int initial_backoff_ms_;
};

// ---------------------------------------------------------------------------
// Mock providers (deterministic, offline)
// ---------------------------------------------------------------------------

// Reconstructs each masked word correctly with a per-sample probability and
// otherwise substitutes a decoy word, deterministically from the request
// seed. Samples must be registered (id, original text, recovery probability)
// before use.
class MockDenoiser : public Denoiser {
 public:
  void register_sample(const std::string& id, const std::string& text,
                       double recovery_probability);

  std::string denoise(const DenoiseRequest& request) override;
  std::string identity() const override { return "mock-denoiser"; }

  int call_count() const { return calls_.load(); }

 private:
  struct Entry {
    std::string text;
    std::vector<WordSpan> spans;
    double recovery = 1.0;
  };
  std::unordered_map<std::string, Entry> samples_;
  std::atomic<int> calls_{0};
};

// Signed feature hashing over whitespace-split words: each word is hashed to
// one of `dimension` buckets with a +/-1 sign and counts accumulate. The
// vector is not normalized. Lexical overlap therefore tracks cosine
// similarity, which is the property the real embedder is assumed to provide.
class MockEmbedder : public Embedder {
 public:
  explicit MockEmbedder(int dimension);

  Embedding embed(const std::string& text) override;
  std::string identity() const override;

  int call_count() const { return calls_.load(); }

 private:
  int dimension_;
  std::atomic<int> calls_{0};
};

// Canned chat responses, in order; used by tests for parse rules.
class ScriptedChat : public ChatCompleter {
 public:
  explicit ScriptedChat(std::vector<std::string> responses);

  std::string complete(const std::string& prompt, std::uint64_t cache_salt) override;
  std::string identity() const override { return "scripted-chat"; }

  const std::vector<std::string>& prompts_seen() const { return prompts_; }

 private:
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
  std::size_t next_ = 0;
  std::mutex mutex_;
};

// Answers the zero-shot yes/no prompt from a registered text -> label map,
// the way a perfectly informed judge would. Looks the text up by exact match
// on the part after the prompt's TEXT marker.
class MockJudgeChat : public ChatCompleter {
 public:
  void register_text(const std::string& text, Label label);

  std::string complete(const std::string& prompt, std::uint64_t cache_salt) override;
  std::string identity() const override { return "mock-judge"; }

 private:
  std::unordered_map<std::string, Label> verdicts_;
};

// Regenerates a registered target text word-by-word with a per-text recovery
// probability, for offline continuation sampling. Looks the request up by the
// prompt's TEXT section (the context S1).
class MockRegeneratorChat : public ChatCompleter {
 public:
  void register_context(const std::string& context, const std::string& target,
                        double recovery_probability);

  std::string complete(const std::string& prompt, std::uint64_t cache_salt) override;
  std::string identity() const override { return "mock-regenerator"; }

 private:
  struct Entry {
    std::vector<std::string> target_words;
    double recovery = 1.0;
  };
  std::unordered_map<std::string, Entry> entries_;
};

// Shared by the mock denoiser and regenerator: keep each word with
// probability `recovery`, otherwise replace it with a decoy that never equals
// the original.
std::string mock_reconstruct_word(const std::string& original, double recovery,
                                  SplitMix64& rng);

// Extracts the text following the "TEXT:\n" marker of one of our prompt
// templates. Returns the whole prompt when the marker is absent.
std::string prompt_payload(const std::string& prompt);

}  // namespace authentigpt
