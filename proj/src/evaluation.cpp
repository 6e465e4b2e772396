#include "authentigpt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "authentigpt/hash.hpp"
#include "authentigpt/masking.hpp"
#include "authentigpt/similarity.hpp"

namespace authentigpt {

std::vector<TextSample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open dataset file " + path.string());
  }
  std::vector<TextSample> samples;
  std::unordered_set<std::string> ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    TextSample sample;
    try {
      sample = sample_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_number) + ": " +
                       e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_number) + ": " +
                       e.what());
    }
    if (word_spans(sample.text).empty()) {
      throw ParseError(path.string() + ":" + std::to_string(line_number) +
                       ": sample '" + sample.id + "' has no word tokens");
    }
    if (!ids.insert(sample.id).second) {
      throw DuplicateIdError(path.string() + ":" + std::to_string(line_number) +
                             ": duplicate id '" + sample.id + "'");
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

void save_dataset(const std::filesystem::path& path,
                  std::span<const TextSample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot write dataset file " + path.string());
  }
  for (const TextSample& sample : samples) {
    out << to_json(sample).dump() << '\n';
  }
}

Split split_train_test(std::span<const TextSample> samples, int train_per_dataset,
                       std::uint64_t seed) {
  if (train_per_dataset < 1) {
    throw ConfigError("train_per_dataset must be >= 1");
  }

  // Group indices by source, preserving file order inside each group.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups[samples[i].source.value_or("")].push_back(i);
  }

  std::vector<bool> in_train(samples.size(), false);
  for (const auto& [source, indices] : groups) {
    if (static_cast<int>(indices.size()) < train_per_dataset) {
      throw InsufficientSamplesError(
          "dataset '" + source + "' has " + std::to_string(indices.size()) +
          " samples, need at least " + std::to_string(train_per_dataset));
    }
    // Seeded Fisher-Yates over a copy; the first train_per_dataset entries
    // are the training membership.
    std::vector<std::size_t> order = indices;
    SplitMix64 rng(derive_seed(seed, "split:" + source, 1));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t j = i + rng.bounded(order.size() - i);
      std::swap(order[i], order[j]);
    }
    for (int k = 0; k < train_per_dataset; ++k) {
      in_train[order[static_cast<std::size_t>(k)]] = true;
    }
  }

  Split split;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(samples[i]);
  }
  return split;
}

double accuracy(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw LengthMismatchError("predictions and truths differ in length");
  }
  if (predictions.empty()) {
    throw DataError("accuracy of an empty prediction list");
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(predictions.size());
}

// --- synthetic harness ---------------------------------------------------------

void SyntheticCorpusSpec::validate() const {
  if (n_human < 1 || n_machine < 1) {
    throw ConfigError("need at least one sample per class");
  }
  if (vocabulary_size < 2) throw ConfigError("vocabulary too small");
  if (words_per_sample < 1) throw ConfigError("words_per_sample must be >= 1");
  // p_h <= p_m: machines reconstruct their own text at least as well. The
  // equal case is allowed so null experiments can disable the separation.
  if (!(human_recovery >= 0.0 && human_recovery <= machine_recovery &&
        machine_recovery <= 1.0)) {
    throw ConfigError("recovery probabilities must satisfy 0 <= p_h <= p_m <= 1");
  }
  if (embed_dimension < 1) throw ConfigError("embed_dimension must be >= 1");
}

namespace {

std::string vocab_word(int index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "w%04d", index);
  return buffer;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.denoiser = std::make_shared<MockDenoiser>();
  corpus.embedder = std::make_shared<MockEmbedder>(spec.embed_dimension);

  SplitMix64 rng(spec.seed);
  auto make_sample = [&](Label label, int index) {
    std::string text;
    for (int w = 0; w < spec.words_per_sample; ++w) {
      if (w > 0) text.push_back(' ');
      text += vocab_word(static_cast<int>(
          rng.bounded(static_cast<std::uint64_t>(spec.vocabulary_size))));
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%s-%04d", to_string(label).c_str(), index);
    TextSample sample{id, std::move(text), label,
                      "synthetic_" + to_string(label)};
    corpus.denoiser->register_sample(
        sample.id, sample.text,
        label == Label::machine ? spec.machine_recovery : spec.human_recovery);
    return sample;
  };

  corpus.samples.reserve(static_cast<std::size_t>(spec.n_human + spec.n_machine));
  for (int i = 0; i < spec.n_human; ++i) {
    corpus.samples.push_back(make_sample(Label::human, i));
  }
  for (int i = 0; i < spec.n_machine; ++i) {
    corpus.samples.push_back(make_sample(Label::machine, i));
  }
  return corpus;
}

// --- reporting ---------------------------------------------------------------

std::string EvaluationReport::to_table() const {
  std::ostringstream out;
  out << "dataset                      samples  accuracy\n";
  out << "-------------------------------------------------\n";
  for (const auto& [source, acc] : per_dataset_accuracy) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-28s %7d  %8.4f\n", source.c_str(),
                  sample_count.at(source), acc);
    out << line;
  }
  out << "-------------------------------------------------\n";
  if (aggregate_auroc) {
    char line[64];
    std::snprintf(line, sizeof(line), "aggregate AUROC: %.4f\n", *aggregate_auroc);
    out << line;
  } else {
    out << "aggregate AUROC: n/a (single class)\n";
  }
  return out.str();
}

json to_json(const EvaluationReport& report) {
  json per_dataset = json::object();
  for (const auto& [source, acc] : report.per_dataset_accuracy) {
    per_dataset[source] = json{{"accuracy", acc},
                               {"samples", report.sample_count.at(source)}};
  }
  json out{{"per_dataset", per_dataset},
           {"config", to_json(report.config)},
           {"models",
            json{{"denoiser", report.denoiser_identity},
                 {"embedder", report.embedder_identity}}}};
  if (report.aggregate_auroc) {
    out["aggregate_auroc"] = *report.aggregate_auroc;
  } else {
    out["aggregate_auroc"] = nullptr;
  }
  return out;
}

EvaluationReport report_from_json(const json& value) {
  EvaluationReport report;
  try {
    for (const auto& [source, entry] : value.at("per_dataset").items()) {
      report.per_dataset_accuracy[source] = entry.at("accuracy").get<double>();
      report.sample_count[source] = entry.at("samples").get<int>();
    }
    if (!value.at("aggregate_auroc").is_null()) {
      report.aggregate_auroc = value["aggregate_auroc"].get<double>();
    }
    report.config = pipeline_config_from_json(value.at("config"));
    report.denoiser_identity = value.at("models").at("denoiser").get<std::string>();
    report.embedder_identity = value.at("models").at("embedder").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad evaluation report: ") + e.what());
  }
  return report;
}

EvaluationReport evaluate(const DetectorModel& model,
                          const std::map<std::string, std::vector<TextSample>>& test_sets,
                          const PipelineConfig& config, Denoiser& denoiser,
                          Embedder& embedder) {
  if (model.alpha != config.alpha || model.beta != config.beta) {
    throw MixedConfigError(
        "model was trained with alpha=" + std::to_string(model.alpha) +
        " beta=" + std::to_string(model.beta) + " but the run uses alpha=" +
        std::to_string(config.alpha) + " beta=" + std::to_string(config.beta));
  }

  EvaluationReport report;
  report.config = config;
  report.denoiser_identity = denoiser.identity();
  report.embedder_identity = embedder.identity();

  std::vector<double> pooled_posteriors;
  std::vector<Label> pooled_truths;

  for (const auto& [source, samples] : test_sets) {
    if (samples.empty()) {
      throw DataError("test set '" + source + "' is empty");
    }
    std::vector<Label> truths;
    truths.reserve(samples.size());
    for (const TextSample& sample : samples) {
      if (!sample.label) {
        throw DataError("sample '" + sample.id + "' in test set '" + source +
                        "' is unlabeled");
      }
      truths.push_back(*sample.label);
    }

    const std::vector<SimilarityRecord> records =
        get_similarity_batch(samples, config, denoiser, embedder);

    std::vector<Label> predictions;
    predictions.reserve(records.size());
    for (const SimilarityRecord& record : records) {
      const Classification verdict = classify(model, record.mean);
      predictions.push_back(verdict.label);
      pooled_posteriors.push_back(verdict.posterior);
    }
    pooled_truths.insert(pooled_truths.end(), truths.begin(), truths.end());

    report.per_dataset_accuracy[source] = accuracy(predictions, truths);
    report.sample_count[source] = static_cast<int>(samples.size());
  }

  const bool has_human = std::find(pooled_truths.begin(), pooled_truths.end(),
                                   Label::human) != pooled_truths.end();
  const bool has_machine = std::find(pooled_truths.begin(), pooled_truths.end(),
                                     Label::machine) != pooled_truths.end();
  if (has_human && has_machine) {
    report.aggregate_auroc = auroc(pooled_posteriors, pooled_truths);
  }
  return report;
}

json similarity_histograms(const DetectorModel& model,
                           std::span<const double> scores,
                           std::span<const Label> labels, int bins) {
  if (scores.size() != labels.size()) {
    throw LengthMismatchError("scores and labels differ in length");
  }
  if (scores.empty()) throw DataError("no scores to bin");
  if (bins < 1) throw ConfigError("need at least one bin");

  auto binned = [&](std::span<const double> values) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) hi = lo + 1.0;  // single-point spread, one occupied bin
    json edges = json::array();
    for (int b = 0; b <= bins; ++b) {
      edges.push_back(lo + (hi - lo) * static_cast<double>(b) /
                               static_cast<double>(bins));
    }
    std::vector<int> human(static_cast<std::size_t>(bins), 0);
    std::vector<int> machine(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      int b = static_cast<int>(std::floor((values[i] - lo) / (hi - lo) *
                                          static_cast<double>(bins)));
      b = std::clamp(b, 0, bins - 1);
      (labels[i] == Label::human ? human : machine)[static_cast<std::size_t>(b)]++;
    }
    return json{{"edges", edges}, {"human", human}, {"machine", machine}};
  };

  std::vector<double> transformed;
  transformed.reserve(scores.size());
  for (double score : scores) {
    transformed.push_back(boxcox(score + model.shift, model.lambda));
  }
  return json{{"raw", binned(scores)},
              {"transformed", binned(transformed)}};
}

}  // namespace authentigpt
