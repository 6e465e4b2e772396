#include "authentigpt/providers.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#ifdef AUTHENTIGPT_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "authentigpt/hash.hpp"

namespace authentigpt {

namespace {

std::atomic<std::uint64_t> g_http_requests{0};

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n\f\v");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

std::uint64_t http_request_count() { return g_http_requests.load(); }

std::string to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::remote_chat: return "remote_chat";
    case ProviderKind::remote_embedding: return "remote_embedding";
    case ProviderKind::mock_denoiser: return "mock_denoiser";
    case ProviderKind::mock_embedder: return "mock_embedder";
  }
  return "unknown";
}

void ProviderConfig::validate() const {
  const bool remote = kind == ProviderKind::remote_chat ||
                      kind == ProviderKind::remote_embedding;
  if (remote) {
    if (endpoint_url.empty()) {
      throw ConfigError("remote provider requires an endpoint URL");
    }
    if (credential_ref.empty()) {
      throw ConfigError("remote provider requires a credential env var name");
    }
  } else {
    if (!endpoint_url.empty() || !credential_ref.empty()) {
      throw ConfigError("mock providers must not carry endpoint or credentials");
    }
  }
  if (!(timeout_seconds > 0)) {
    throw ConfigError("timeout_seconds must be positive");
  }
  if (max_retries < 0) {
    throw ConfigError("max_retries must be >= 0");
  }
}

std::string ProviderConfig::identity() const {
  return to_string(kind) + ":" + endpoint_url + ":" + model_name;
}

// --- cache -----------------------------------------------------------------

CacheKey make_cache_key(std::string_view provider_identity,
                        std::string_view operation, const json& payload) {
  std::string material;
  material.append(provider_identity);
  material.push_back('\x1e');
  material.append(operation);
  material.push_back('\x1e');
  material.append(payload.dump());  // sorted keys, no insignificant whitespace
  return CacheKey{sha256_hex(material)};
}

ResponseCache::ResponseCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) {
    throw ConfigError("cannot create cache directory " + directory_.string() +
                      ": " + ec.message());
  }
}

std::filesystem::path ResponseCache::entry_path(const CacheKey& key) const {
  return directory_ / (key.digest + ".json");
}

std::mutex& ResponseCache::mutex_for(const std::string& digest) {
  std::lock_guard<std::mutex> lock(registry_mutex_);
  auto& slot = key_mutexes_[digest];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string ResponseCache::cached_call(const CacheKey& key,
                                       const json& request_echo,
                                       const std::function<std::string()>& call) {
  std::lock_guard<std::mutex> key_lock(mutex_for(key.digest));
  const std::filesystem::path path = entry_path(key);

  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      json entry = json::parse(buffer.str());
      std::string response = entry.at("response").get<std::string>();
      if (entry.at("checksum").get<std::string>() == sha256_hex(response)) {
        hits_.fetch_add(1);
        return response;
      }
    } catch (const json::exception&) {
      // corrupt entry: fall through to the live call and rewrite
    }
  }

  misses_.fetch_add(1);
  std::string response = call();

  json entry{{"request", request_echo},
             {"response", response},
             {"checksum", sha256_hex(response)}};
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << entry.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);  // atomic on POSIX
  return response;
}

// --- remote transport --------------------------------------------------------

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /v1/...
};

ParsedUrl parse_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL must include a scheme: " + url);
  }
  const std::size_t path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string bearer_token(const ProviderConfig& config) {
  const char* secret = std::getenv(config.credential_ref.c_str());
  if (secret == nullptr || *secret == '\0') {
    throw ConfigError("environment variable " + config.credential_ref +
                      " is not set");
  }
  return secret;
}

// One POST with retries. Retryable: connection failures, timeouts, 408, 409,
// 429 and 5xx. Backoff is initial_ms * 2^attempt scaled by full jitter drawn
// from the request seed.
json post_with_retries(const ProviderConfig& config, const std::string& path_hint,
                       const json& body, std::uint64_t seed, int initial_ms,
                       const std::string& key_digest) {
  const ParsedUrl url = parse_url(config.endpoint_url);
  const std::string token = bearer_token(config);
  const std::string payload = body.dump();
  SplitMix64 jitter(seed ^ 0x7261647a6974746aULL);

  std::string last_failure;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      const double scale = static_cast<double>(1 << (attempt - 1));
      const auto delay_ms = static_cast<std::int64_t>(
          static_cast<double>(initial_ms) * scale * jitter.uniform01());
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }

    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::duration<double>(config.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config.timeout_seconds));
    client.set_write_timeout(std::chrono::duration<double>(config.timeout_seconds));
    client.set_bearer_token_auth(token);

    g_http_requests.fetch_add(1);
    // A bare origin URL falls back to the conventional path for the operation.
    const std::string& path = (url.path == "/") ? path_hint : url.path;
    httplib::Result result = client.Post(path, payload, "application/json");

    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 408 || status == 409 || status == 429 || status >= 500) {
      last_failure = "status " + std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw ProviderUnavailableError("request failed with status " +
                                     std::to_string(status) + " (cache key " +
                                     key_digest + "): " + result->body);
    }
    try {
      return json::parse(result->body);
    } catch (const json::exception& e) {
      throw MalformedResponseError("response is not JSON (cache key " +
                                   key_digest + "): " + e.what());
    }
  }
  throw ProviderUnavailableError("gave up after " +
                                 std::to_string(config.max_retries + 1) +
                                 " attempts (cache key " + key_digest +
                                 "): " + last_failure);
}

}  // namespace

// --- remote chat -------------------------------------------------------------

HttpChatCompleter::HttpChatCompleter(ProviderConfig config, ResponseCache* cache,
                                     double temperature, int initial_backoff_ms)
    : config_(std::move(config)),
      cache_(cache),
      temperature_(temperature),
      initial_backoff_ms_(initial_backoff_ms) {
  config_.validate();
  if (config_.kind != ProviderKind::remote_chat) {
    throw ConfigError("HttpChatCompleter requires a remote_chat config");
  }
}

std::string HttpChatCompleter::identity() const { return config_.identity(); }

std::string HttpChatCompleter::complete(const std::string& prompt,
                                        std::uint64_t cache_salt) {
  json body{{"model", config_.model_name},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", temperature_}};

  json key_material = body;
  key_material["salt"] = cache_salt;  // keyed per draw, not sent over the wire
  const CacheKey key = make_cache_key(identity(), "chat", key_material);

  auto live = [&]() -> std::string {
    json response = post_with_retries(config_, "/v1/chat/completions", body,
                                      cache_salt, initial_backoff_ms_, key.digest);
    try {
      // Empty content is returned as-is; the similarity pipeline owns the
      // retry-once-then-error rule for empty denoised text.
      return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw MalformedResponseError("chat response missing message content (cache key " +
                                   key.digest + "): " + e.what());
    }
  };

  std::string raw = cache_ ? cache_->cached_call(key, key_material, live) : live();
  return trim(raw);
}

// --- prompt templates ---------------------------------------------------------

std::string denoise_prompt(const std::string& masked_text,
                           const std::string& mask_token) {
  return "Fill in every " + mask_token +
         " token in the following text with the most likely original word. "
         "Return only the completed text, with no commentary.\n\nTEXT:\n" +
         masked_text;
}

std::string prompt_payload(const std::string& prompt) {
  static const std::string marker = "TEXT:\n";
  const std::size_t at = prompt.find(marker);
  if (at == std::string::npos) return prompt;
  return prompt.substr(at + marker.size());
}

PromptDenoiser::PromptDenoiser(std::shared_ptr<ChatCompleter> chat)
    : chat_(std::move(chat)) {}

std::string PromptDenoiser::identity() const {
  return "denoiser(" + chat_->identity() + ")";
}

std::string PromptDenoiser::denoise(const DenoiseRequest& request) {
  if (request.masked.text.find(request.mask_token) == std::string::npos) {
    throw ConfigError("masked text contains no mask token");
  }
  return trim(chat_->complete(denoise_prompt(request.masked.text,
                                             request.mask_token),
                              request.seed));
}

// --- remote embeddings ---------------------------------------------------------

HttpEmbedder::HttpEmbedder(ProviderConfig config, ResponseCache* cache,
                           int initial_backoff_ms)
    : config_(std::move(config)), cache_(cache), initial_backoff_ms_(initial_backoff_ms) {
  config_.validate();
  if (config_.kind != ProviderKind::remote_embedding) {
    throw ConfigError("HttpEmbedder requires a remote_embedding config");
  }
}

std::string HttpEmbedder::identity() const { return config_.identity(); }

Embedding HttpEmbedder::embed(const std::string& text) {
  if (text.empty()) throw EmptyTextError("cannot embed empty text");
  json body{{"model", config_.model_name}, {"input", text}};
  const CacheKey key = make_cache_key(identity(), "embedding", body);
  const std::uint64_t seed = fnv1a64(key.digest);

  auto live = [&]() -> std::string {
    json response = post_with_retries(config_, "/v1/embeddings", body, seed,
                                      initial_backoff_ms_, key.digest);
    try {
      return response.at("data").at(0).at("embedding").dump();
    } catch (const json::exception& e) {
      throw MalformedResponseError("embedding response missing vector (cache key " +
                                   key.digest + "): " + e.what());
    }
  };

  const std::string raw = cache_ ? cache_->cached_call(key, body, live) : live();
  Embedding embedding;
  try {
    embedding.vector = json::parse(raw).get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw MalformedResponseError("embedding vector is not a number array (cache key " +
                                 key.digest + "): " + e.what());
  }
  if (embedding.vector.empty()) {
    throw MalformedResponseError("embedding vector is empty (cache key " +
                                 key.digest + ")");
  }
  for (double entry : embedding.vector) {
    if (!std::isfinite(entry)) {
      throw MalformedResponseError("embedding vector has non-finite entries (cache key " +
                                   key.digest + ")");
    }
  }
  return embedding;
}

// --- mocks ---------------------------------------------------------------------

std::string mock_reconstruct_word(const std::string& original, double recovery,
                                  SplitMix64& rng) {
  const bool recovered = rng.uniform01() < recovery;
  if (recovered) return original;
  std::string decoy = "zz" + std::to_string(rng.bounded(1000000));
  if (decoy == original) decoy += "x";
  return decoy;
}

void MockDenoiser::register_sample(const std::string& id, const std::string& text,
                                   double recovery_probability) {
  samples_[id] = Entry{text, word_spans(text), recovery_probability};
}

std::string MockDenoiser::denoise(const DenoiseRequest& request) {
  calls_.fetch_add(1);
  const auto it = samples_.find(request.sample_id);
  if (it == samples_.end()) {
    throw ConfigError("mock denoiser: sample '" + request.sample_id +
                      "' was never registered");
  }
  const Entry& entry = it->second;
  if (static_cast<int>(entry.spans.size()) != request.masked.original_word_count) {
    throw ConfigError("mock denoiser: registered text for '" + request.sample_id +
                      "' does not match the masked word count");
  }

  // Splice reconstructed words back into the original layout, so perfect
  // recovery reproduces the original byte-for-byte. The decision stream is
  // salted to stay independent of the masking stream for the same seed.
  SplitMix64 rng(request.seed ^ 0x64656e6f69736572ULL);
  std::string out;
  out.reserve(entry.text.size());
  std::size_t cursor = 0;
  for (int position : request.masked.masked_positions) {
    const WordSpan& span = entry.spans[static_cast<std::size_t>(position)];
    out.append(entry.text, cursor, span.begin - cursor);
    const std::string original =
        entry.text.substr(span.begin, span.end - span.begin);
    out += mock_reconstruct_word(original, entry.recovery, rng);
    cursor = span.end;
  }
  out.append(entry.text, cursor, entry.text.size() - cursor);
  return out;
}

MockEmbedder::MockEmbedder(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw ConfigError("embedder dimension must be >= 1");
}

std::string MockEmbedder::identity() const {
  return "mock-embedder-d" + std::to_string(dimension_);
}

Embedding MockEmbedder::embed(const std::string& text) {
  calls_.fetch_add(1);
  if (text.empty()) throw EmptyTextError("cannot embed empty text");
  Embedding embedding;
  embedding.vector.assign(static_cast<std::size_t>(dimension_), 0.0);
  for (const std::string& word : split_words(text)) {
    const std::uint64_t h = fnv1a64(word);
    const std::size_t bucket =
        static_cast<std::size_t>(h % static_cast<std::uint64_t>(dimension_));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    embedding.vector[bucket] += sign;
  }
  return embedding;
}

ScriptedChat::ScriptedChat(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedChat::complete(const std::string& prompt, std::uint64_t) {
  std::lock_guard<std::mutex> lock(mutex_);
  prompts_.push_back(prompt);
  if (next_ >= responses_.size()) {
    throw ProviderUnavailableError("scripted chat ran out of responses");
  }
  return responses_[next_++];
}

void MockJudgeChat::register_text(const std::string& text, Label label) {
  verdicts_[text] = label;
}

std::string MockJudgeChat::complete(const std::string& prompt, std::uint64_t) {
  const std::string payload = prompt_payload(prompt);
  const auto it = verdicts_.find(payload);
  if (it == verdicts_.end()) return "no";
  return it->second == Label::machine ? "yes" : "no";
}

void MockRegeneratorChat::register_context(const std::string& context,
                                           const std::string& target,
                                           double recovery_probability) {
  entries_[context] = Entry{split_words(target), recovery_probability};
}

std::string MockRegeneratorChat::complete(const std::string& prompt,
                                          std::uint64_t cache_salt) {
  const std::string payload = prompt_payload(prompt);
  const auto it = entries_.find(payload);
  if (it == entries_.end()) {
    throw ConfigError("mock regenerator: unregistered context");
  }
  SplitMix64 rng(fnv1a64(payload) ^ cache_salt);
  std::string out;
  for (std::size_t i = 0; i < it->second.target_words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += mock_reconstruct_word(it->second.target_words[i], it->second.recovery, rng);
  }
  return out;
}

}  // namespace authentigpt
