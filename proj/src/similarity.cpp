#include "authentigpt/similarity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "authentigpt/masking.hpp"

namespace authentigpt {

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatchError("embedding dimensions differ: " +
                                 std::to_string(a.dimension()) + " vs " +
                                 std::to_string(b.dimension()));
  }
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    dot += a.vector[i] * b.vector[i];
    norm_a += a.vector[i] * a.vector[i];
    norm_b += b.vector[i] * b.vector[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw ZeroVectorError("cosine similarity of a zero vector is undefined");
  }
  return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

namespace {

constexpr std::uint64_t kEmptyRetrySalt = 0x656d707479313233ULL;

std::string trimmed(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n\f\v");
  return text.substr(begin, end - begin + 1);
}

std::string annotate(const std::string& what, const std::string& sample_id,
                     int repetition) {
  return "sample '" + sample_id + "' repetition " + std::to_string(repetition) +
         ": " + what;
}

}  // namespace

SimilarityRecord get_similarity(const TextSample& sample,
                                const PipelineConfig& config,
                                Denoiser& denoiser, Embedder& embedder) {
  config.validate();

  const Embedding original = embedder.embed(sample.text);

  SimilarityRecord record;
  record.sample_id = sample.id;
  record.per_repetition.reserve(static_cast<std::size_t>(config.beta));

  double sum = 0.0;
  for (int repetition = 1; repetition <= config.beta; ++repetition) {
    const std::uint64_t seed =
        derive_seed(config.global_seed, sample.id, repetition);
    try {
      DenoiseRequest request{mask_sentences(sample, config.alpha, seed,
                                            config.mask_token),
                             sample.id, repetition, seed, config.mask_token};

      std::string denoised = trimmed(denoiser.denoise(request));
      if (denoised.empty()) {
        // one retry with the same prompt, on a fresh cache slot
        DenoiseRequest retry = request;
        retry.seed = seed ^ kEmptyRetrySalt;
        denoised = trimmed(denoiser.denoise(retry));
      }
      if (denoised.empty()) {
        throw MalformedResponseError("denoised text empty after retry");
      }

      const double value =
          cosine_similarity(original, embedder.embed(denoised));
      record.per_repetition.push_back(value);
      sum += value;
    } catch (const ProviderUnavailableError& e) {
      throw ProviderUnavailableError(annotate(e.what(), sample.id, repetition));
    } catch (const MalformedResponseError& e) {
      throw MalformedResponseError(annotate(e.what(), sample.id, repetition));
    } catch (const DataError& e) {
      throw DataError(annotate(e.what(), sample.id, repetition));
    }
  }

  record.mean = sum / static_cast<double>(config.beta);
  return record;
}

std::vector<SimilarityRecord> get_similarity_batch(
    std::span<const TextSample> samples, const PipelineConfig& config,
    Denoiser& denoiser, Embedder& embedder) {
  config.validate();
  {
    std::unordered_map<std::string, int> seen;
    for (const TextSample& sample : samples) {
      if (++seen[sample.id] > 1) {
        throw DuplicateIdError("duplicate sample id '" + sample.id + "'");
      }
    }
  }
  if (samples.empty()) return {};

  const std::size_t n = samples.size();
  std::vector<std::optional<SimilarityRecord>> slots(n);
  struct Failure {
    std::size_t index;
    BatchError::Kind kind;
    std::string message;
    std::string sample_id;
  };
  std::vector<Failure> failures;
  std::mutex failures_mutex;

  std::atomic<std::size_t> cursor{0};
  const int worker_count =
      static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(
                                                    config.max_concurrent_requests)));

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= n) return;
      try {
        slots[index] = get_similarity(samples[index], config, denoiser, embedder);
      } catch (const ProviderError& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.push_back({index, BatchError::Kind::provider, e.what(),
                            samples[index].id});
      } catch (const ConfigError& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.push_back({index, BatchError::Kind::config, e.what(),
                            samples[index].id});
      } catch (const DataError& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.push_back({index, BatchError::Kind::data, e.what(),
                            samples[index].id});
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.push_back({index, BatchError::Kind::other, e.what(),
                            samples[index].id});
      }
    }
  };

  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  if (!failures.empty()) {
    const auto first = std::min_element(
        failures.begin(), failures.end(),
        [](const Failure& a, const Failure& b) { return a.index < b.index; });
    std::vector<SimilarityRecord> completed;
    for (std::size_t i = 0; i < first->index; ++i) {
      if (slots[i]) completed.push_back(std::move(*slots[i]));
    }
    throw BatchError(first->kind, first->message, first->sample_id,
                     std::move(completed));
  }

  std::vector<SimilarityRecord> records;
  records.reserve(n);
  for (auto& slot : slots) records.push_back(std::move(*slot));
  return records;
}

}  // namespace authentigpt
