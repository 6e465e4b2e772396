#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "authentigpt/classifier.hpp"
#include "authentigpt/core.hpp"
#include "authentigpt/providers.hpp"

namespace authentigpt {

// JSONL dataset per the core schema; samples come back in file order.
// Throws ParseError (with 1-based line number) and DuplicateIdError.
std::vector<TextSample> load_dataset(const std::filesystem::path& path);

void save_dataset(const std::filesystem::path& path,
                  std::span<const TextSample> samples);

// Seeded split: `train_per_dataset` samples from each source group go to
// train, the rest to test, both in original file order. Throws
// InsufficientSamplesError when a group is smaller than requested.
struct Split {
  std::vector<TextSample> train;
  std::vector<TextSample> test;
};
Split split_train_test(std::span<const TextSample> samples, int train_per_dataset,
                       std::uint64_t seed);

// matches / total. Throws LengthMismatchError; empty input is an error.
double accuracy(std::span<const Label> predictions, std::span<const Label> truths);

// ---------------------------------------------------------------------------
// Synthetic two-class harness
// ---------------------------------------------------------------------------

struct SyntheticCorpusSpec {
  int n_human = 100;
  int n_machine = 100;
  int vocabulary_size = 500;
  int words_per_sample = 60;
  double machine_recovery = 0.9;  // p_m
  double human_recovery = 0.6;    // p_h
  std::uint64_t seed = 0;
  int embed_dimension = 256;

  void validate() const;
};

struct SyntheticCorpus {
  std::vector<TextSample> samples;  // humans first, then machines
  std::shared_ptr<MockDenoiser> denoiser;
  std::shared_ptr<MockEmbedder> embedder;
};

// Samples drawn word-by-word from an integer-named vocabulary ("w0000"...),
// with the mock denoiser wired to recover machine samples at p_m and human
// samples at p_h. Deterministic for a fixed spec.
SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct EvaluationReport {
  std::map<std::string, double> per_dataset_accuracy;
  std::map<std::string, int> sample_count;
  std::optional<double> aggregate_auroc;  // absent when only one class seen
  PipelineConfig config;
  std::string denoiser_identity;
  std::string embedder_identity;

  std::string to_table() const;
};

json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const json& value);

// Per-dataset accuracy from hard labels plus one AUROC over the pooled
// posteriors of every test set. Samples must be labeled. Throws
// MixedConfigError if the model's alpha/beta differ from the run config.
EvaluationReport evaluate(const DetectorModel& model,
                          const std::map<std::string, std::vector<TextSample>>& test_sets,
                          const PipelineConfig& config, Denoiser& denoiser,
                          Embedder& embedder);

// Binned similarity counts per class, before and after the model's
// shift+Box-Cox transform; exported for external plotting.
json similarity_histograms(const DetectorModel& model,
                           std::span<const double> scores,
                           std::span<const Label> labels, int bins = 20);

}  // namespace authentigpt
