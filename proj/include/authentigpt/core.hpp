#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace authentigpt {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input/data problems (bad files, bad labels, empty text, ...). CLI exit 4.
class DataError : public Error {
 public:
  using Error::Error;
};

// Configuration problems (bad ratios, missing credentials, ...). CLI exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Provider problems (network, malformed responses, ...). CLI exit 3.
class ProviderError : public Error {
 public:
  using Error::Error;
};

class EmptyTextError : public DataError {
 public:
  using DataError::DataError;
};

class InvalidRatioError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ProviderUnavailableError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class MalformedResponseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class CacheCorruptError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class DimensionMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class ZeroVectorError : public DataError {
 public:
  using DataError::DataError;
};

class NonPositiveInputError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

class SingleClassError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateIdError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientSamplesError : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class MixedConfigError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UnparseableVerdictError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class EmptySequenceError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyContinuationError : public DataError {
 public:
  using DataError::DataError;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Label { human, machine };

std::string to_string(Label label);
Label label_from_string(std::string_view text);

// One labeled or unlabeled document flowing through the pipeline.
struct TextSample {
  std::string id;
  std::string text;
  std::optional<Label> label;
  std::optional<std::string> source;

  bool operator==(const TextSample&) const = default;
};

struct PipelineConfig {
  double alpha = 0.08;            // masking ratio, in (0,1)
  int beta = 10;                  // repetitions averaged per sample
  std::uint64_t global_seed = 0;
  std::string mask_token = "<unk>";
  int max_concurrent_requests = 4;

  void validate() const;  // throws ConfigError / InvalidRatioError
};

// Per-sample averaged cosine similarity plus the per-repetition values.
struct SimilarityRecord {
  std::string sample_id;
  std::vector<double> per_repetition;
  double mean = 0.0;

  bool operator==(const SimilarityRecord&) const = default;
};

struct GmmParams {
  std::array<double, 2> weights{};
  std::array<double, 2> means{};
  std::array<double, 2> variances{};

  bool operator==(const GmmParams&) const = default;
};

// Trained classifier: Box-Cox lambda, positivity shift, 1-D two-component
// mixture, which component is the machine one, and the alpha/beta the
// similarity scores were produced with.
struct DetectorModel {
  double lambda = 0.0;
  double shift = 0.0;
  GmmParams gmm;
  int machine_component = 0;
  double alpha = 0.0;
  int beta = 0;

  bool operator==(const DetectorModel&) const = default;
};

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

// SplitMix64. Fully specified here so streams are identical on every
// platform; std::uniform_* distributions are not portable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n); rejection sampling.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Deterministic, collision-resistant seed for one (sample, repetition) unit
// of work. Pure function of its arguments; identical across runs, platforms
// and scheduling orders.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id,
                          int repetition);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// Dataset format, one object per JSONL line:
//   { "id": str, "text": str, "label"?: "human"|"machine", "source"?: str }
json to_json(const TextSample& sample);
TextSample sample_from_json(const json& value);

// { "id": str, "mean": num, "per_repetition": [num, ...] }
json to_json(const SimilarityRecord& record);
SimilarityRecord similarity_record_from_json(const json& value);

// Model file schema:
//   { "lambda", "shift", "weights": [n,n], "means": [n,n],
//     "variances": [n,n], "machine_component": 0|1, "alpha", "beta" }
json to_json(const DetectorModel& model);
DetectorModel model_from_json(const json& value);

json to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const json& value);

}  // namespace authentigpt
