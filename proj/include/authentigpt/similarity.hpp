#pragma once

#include <span>
#include <vector>

#include "authentigpt/core.hpp"
#include "authentigpt/providers.hpp"

namespace authentigpt {

// dot(a,b) / (|a|*|b|), clamped to [-1,1] against rounding overshoot.
// Throws DimensionMismatchError / ZeroVectorError.
double cosine_similarity(const Embedding& a, const Embedding& b);

// One sample through beta rounds of mask -> denoise -> embed -> cosine.
// Repetition i uses derive_seed(config.global_seed, sample.id, i), so the
// record is a pure function of its inputs, independent of scheduling. The
// original text is embedded once and reused across repetitions.
SimilarityRecord get_similarity(const TextSample& sample,
                                const PipelineConfig& config,
                                Denoiser& denoiser, Embedder& embedder);

// Fail-fast batch error: carries the records of every sample that precedes
// the first failure in input order.
class BatchError : public Error {
 public:
  enum class Kind { provider, data, config, other };

  BatchError(Kind kind, std::string message, std::string failed_sample_id,
             std::vector<SimilarityRecord> completed)
      : Error(std::move(message)),
        kind_(kind),
        failed_sample_id_(std::move(failed_sample_id)),
        completed_(std::move(completed)) {}

  Kind kind() const { return kind_; }
  const std::string& failed_sample_id() const { return failed_sample_id_; }
  const std::vector<SimilarityRecord>& completed() const { return completed_; }

 private:
  Kind kind_;
  std::string failed_sample_id_;
  std::vector<SimilarityRecord> completed_;
};

// Runs samples concurrently up to config.max_concurrent_requests. Output
// order matches input order and every record equals the sequential
// per-sample result.
std::vector<SimilarityRecord> get_similarity_batch(
    std::span<const TextSample> samples, const PipelineConfig& config,
    Denoiser& denoiser, Embedder& embedder);

}  // namespace authentigpt
