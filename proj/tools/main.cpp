// authentigpt: detects machine-generated text by masking words, asking a
// black-box LLM to fill them back in, and scoring how faithfully the
// reconstruction matches the original in embedding space.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "authentigpt/baselines.hpp"
#include "authentigpt/classifier.hpp"
#include "authentigpt/evaluation.hpp"
#include "authentigpt/hash.hpp"
#include "authentigpt/providers.hpp"
#include "authentigpt/similarity.hpp"

namespace fs = std::filesystem;
using namespace authentigpt;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr const char* kChatEndpointVar = "AUTHENTIGPT_CHAT_ENDPOINT";
constexpr const char* kChatKeyVar = "AUTHENTIGPT_CHAT_KEY";
constexpr const char* kEmbedEndpointVar = "AUTHENTIGPT_EMBED_ENDPOINT";
constexpr const char* kEmbedKeyVar = "AUTHENTIGPT_EMBED_KEY";

struct Options {
  double alpha = 0.08;
  int beta = 10;
  std::uint64_t seed = 0;
  std::string mask_token = "<unk>";
  int concurrency = 4;
  std::string provider = "mock";
  double mock_recovery_machine = 0.9;
  double mock_recovery_human = 0.6;
  int embed_dim = 256;
  double lambda_min = -2.0;
  double lambda_max = 2.0;
  int lambda_count = 100;
  int train_per_dataset = 20;
  std::string cache_dir;
  std::string chat_model = "gpt-3.5-turbo";
  std::string embed_model = "text-embedding-ada-002";
  std::string out_dir = ".";

  // per-command inputs
  std::string data_path;
  std::string model_path;
  std::string report_path;
  std::string histogram_path;
  std::string baseline_method = "zeroshot";
  std::string eval_baseline;
  double tail_fraction = 0.5;
  int ngram_min = 1;
  int ngram_max = 3;
  int bscore_k = 3;

  // synth
  int n_human = 100;
  int n_machine = 100;
  int vocabulary = 500;
  int words_per_sample = 60;
};

PipelineConfig pipeline_config(const Options& options) {
  PipelineConfig config;
  config.alpha = options.alpha;
  config.beta = options.beta;
  config.global_seed = options.seed;
  config.mask_token = options.mask_token;
  config.max_concurrent_requests = options.concurrency;
  config.validate();
  return config;
}

std::string env_or_throw(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') {
    throw ConfigError(std::string("environment variable ") + name +
                      " is required for the remote provider");
  }
  return value;
}

struct ProviderSet {
  std::shared_ptr<Denoiser> denoiser;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<ResponseCache> cache;
  std::shared_ptr<MockDenoiser> mock;  // set when provider == mock
};

double mock_recovery_for(const Options& options, const TextSample& sample) {
  if (sample.label == Label::machine) return options.mock_recovery_machine;
  if (sample.label == Label::human) return options.mock_recovery_human;
  // unlabeled: midpoint, so detection on unknown data stays runnable offline
  return 0.5 * (options.mock_recovery_machine + options.mock_recovery_human);
}

ProviderSet make_pipeline_providers(const Options& options,
                                    std::span<const TextSample> samples) {
  ProviderSet set;
  if (options.provider == "mock") {
    set.mock = std::make_shared<MockDenoiser>();
    for (const TextSample& sample : samples) {
      set.mock->register_sample(sample.id, sample.text,
                                mock_recovery_for(options, sample));
    }
    set.denoiser = set.mock;
    set.embedder = std::make_shared<MockEmbedder>(options.embed_dim);
    return set;
  }
  if (options.provider != "remote") {
    throw ConfigError("unknown provider '" + options.provider +
                      "' (expected mock or remote)");
  }

  const std::string cache_dir =
      options.cache_dir.empty() ? "authentigpt_cache" : options.cache_dir;
  set.cache = std::make_shared<ResponseCache>(cache_dir);

  ProviderConfig chat;
  chat.kind = ProviderKind::remote_chat;
  chat.endpoint_url = env_or_throw(kChatEndpointVar);
  chat.model_name = options.chat_model;
  chat.credential_ref = kChatKeyVar;
  auto completer =
      std::make_shared<HttpChatCompleter>(chat, set.cache.get(), 0.0);
  set.denoiser = std::make_shared<PromptDenoiser>(completer);

  ProviderConfig embed;
  embed.kind = ProviderKind::remote_embedding;
  embed.endpoint_url = env_or_throw(kEmbedEndpointVar);
  embed.model_name = options.embed_model;
  embed.credential_ref = kEmbedKeyVar;
  set.embedder = std::make_shared<HttpEmbedder>(embed, set.cache.get());
  return set;
}

std::shared_ptr<ChatCompleter> make_remote_chat(const Options& options,
                                                std::shared_ptr<ResponseCache>& cache,
                                                double temperature) {
  ProviderConfig chat;
  chat.kind = ProviderKind::remote_chat;
  chat.endpoint_url = env_or_throw(kChatEndpointVar);
  chat.model_name = options.chat_model;
  chat.credential_ref = kChatKeyVar;
  if (!cache) {
    const std::string cache_dir =
        options.cache_dir.empty() ? "authentigpt_cache" : options.cache_dir;
    cache = std::make_shared<ResponseCache>(cache_dir);
  }
  return std::make_shared<HttpChatCompleter>(chat, cache.get(), temperature);
}

// --- manifest ------------------------------------------------------------------

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

json resolved_config(const Options& options) {
  return json{{"alpha", options.alpha},
              {"beta", options.beta},
              {"seed", options.seed},
              {"mask_token", options.mask_token},
              {"concurrency", options.concurrency},
              {"provider", options.provider},
              {"mock_recovery_machine", options.mock_recovery_machine},
              {"mock_recovery_human", options.mock_recovery_human},
              {"embed_dim", options.embed_dim},
              {"lambda_grid",
               json{{"min", options.lambda_min},
                    {"max", options.lambda_max},
                    {"count", options.lambda_count}}},
              {"train_per_dataset", options.train_per_dataset},
              {"cache_dir", options.cache_dir},
              {"chat_model", options.chat_model},
              {"embed_model", options.embed_model},
              {"data", options.data_path},
              {"model", options.model_path},
              {"out_dir", options.out_dir}};
}

void write_manifest(const Options& options, const std::string& command,
                    const std::vector<fs::path>& inputs) {
  json digests = json::object();
  for (const fs::path& path : inputs) {
    digests[path.string()] = file_digest(path);
  }
  json manifest{{"command", command},
                {"tool_version", kToolVersion},
                {"timestamp_utc", utc_timestamp()},
                {"resolved_config", resolved_config(options)},
                {"input_digests", digests}};
  std::ofstream out(fs::path(options.out_dir) / "manifest.json",
                    std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

void ensure_out_dir(const Options& options) {
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + options.out_dir +
                      ": " + ec.message());
  }
}

// --- commands ------------------------------------------------------------------

int cmd_train(const Options& options, bool split_requested) {
  ensure_out_dir(options);
  const PipelineConfig config = pipeline_config(options);
  std::vector<TextSample> samples = load_dataset(options.data_path);
  if (samples.empty()) {
    throw DataError("training file " + options.data_path + " is empty");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) {
      throw DataError(options.data_path + ": sample '" + samples[i].id +
                      "' (record " + std::to_string(i + 1) +
                      ") has no label; training requires labels");
    }
  }

  // With --train-per-dataset the input corpus is split here: the per-source
  // head trains the model and the remainder goes to holdout.jsonl for eval.
  if (split_requested) {
    Split split = split_train_test(samples, options.train_per_dataset,
                                   options.seed);
    save_dataset(fs::path(options.out_dir) / "holdout.jsonl", split.test);
    std::cout << "split: " << split.train.size() << " train / "
              << split.test.size() << " holdout\n";
    samples = std::move(split.train);
  }

  ProviderSet providers = make_pipeline_providers(options, samples);
  const std::vector<SimilarityRecord> records = get_similarity_batch(
      samples, config, *providers.denoiser, *providers.embedder);

  TrainingSet training;
  training.scores.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    training.scores.push_back(records[i].mean);
    training.labels.push_back(*samples[i].label);
  }

  const LambdaGrid grid = LambdaGrid::uniform(
      options.lambda_min, options.lambda_max, options.lambda_count);
  const TrainResult result =
      find_threshold(training, grid, config.alpha, config.beta);

  {
    std::ofstream out(fs::path(options.out_dir) / "model.json", std::ios::trunc);
    out << to_json(result.model).dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(options.out_dir) / "lambda_diagnostics.json",
                      std::ios::trunc);
    out << to_json(result.diagnostics).dump(2) << '\n';
  }
  write_manifest(options, "train", {options.data_path});
  std::cout << "trained on " << samples.size() << " samples, training AUROC "
            << result.training_auroc << ", lambda " << result.model.lambda
            << "\n";
  return 0;
}

DetectorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path);
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
}

int cmd_detect(Options options, bool alpha_given, bool beta_given) {
  ensure_out_dir(options);
  const DetectorModel model = load_model(options.model_path);

  // The model's alpha/beta govern detection; explicit flags must agree.
  if (alpha_given && options.alpha != model.alpha) {
    throw MixedConfigError("--alpha " + std::to_string(options.alpha) +
                           " conflicts with the model's alpha " +
                           std::to_string(model.alpha));
  }
  if (beta_given && options.beta != model.beta) {
    throw MixedConfigError("--beta " + std::to_string(options.beta) +
                           " conflicts with the model's beta " +
                           std::to_string(model.beta));
  }
  options.alpha = model.alpha;
  options.beta = model.beta;
  const PipelineConfig config = pipeline_config(options);

  const std::vector<TextSample> samples = load_dataset(options.data_path);
  const fs::path verdict_path = fs::path(options.out_dir) / "verdicts.jsonl";

  if (samples.empty()) {
    std::ofstream(verdict_path, std::ios::trunc);
    write_manifest(options, "detect", {options.data_path, options.model_path});
    return 0;
  }

  ProviderSet providers = make_pipeline_providers(options, samples);
  const std::vector<SimilarityRecord> records = get_similarity_batch(
      samples, config, *providers.denoiser, *providers.embedder);

  std::ofstream out(verdict_path, std::ios::trunc);
  for (const SimilarityRecord& record : records) {
    const Classification verdict = classify(model, record.mean);
    out << json{{"id", record.sample_id},
                {"label", to_string(verdict.label)},
                {"posterior", verdict.posterior},
                {"mean_similarity", record.mean}}
               .dump()
        << '\n';
  }
  out.close();
  write_manifest(options, "detect", {options.data_path, options.model_path});
  return 0;
}

int cmd_eval(const Options& options) {
  ensure_out_dir(options);
  const DetectorModel model = load_model(options.model_path);
  Options effective = options;
  effective.alpha = model.alpha;
  effective.beta = model.beta;
  const PipelineConfig config = pipeline_config(effective);

  const std::vector<TextSample> samples = load_dataset(options.data_path);
  if (samples.empty()) throw DataError("evaluation data is empty");

  std::map<std::string, std::vector<TextSample>> test_sets;
  for (const TextSample& sample : samples) {
    test_sets[sample.source.value_or("default")].push_back(sample);
  }

  ProviderSet providers = make_pipeline_providers(effective, samples);
  const EvaluationReport report = evaluate(
      model, test_sets, config, *providers.denoiser, *providers.embedder);
  if (!report.aggregate_auroc) {
    std::cerr << "warning: only one class present, aggregate AUROC omitted\n";
  }

  json report_json = to_json(report);

  if (!options.eval_baseline.empty()) {
    if (options.eval_baseline != "zeroshot") {
      throw ConfigError("eval supports only the zeroshot baseline column");
    }
    std::shared_ptr<ChatCompleter> judge;
    std::shared_ptr<ResponseCache> chat_cache;
    if (options.provider == "mock") {
      auto mock_judge = std::make_shared<MockJudgeChat>();
      for (const TextSample& sample : samples) {
        mock_judge->register_text(sample.text,
                                  sample.label.value_or(Label::human));
      }
      judge = mock_judge;
    } else {
      judge = make_remote_chat(options, chat_cache, 0.0);
    }
    json baseline{{"method", "zeroshot"}};
    std::vector<double> verdict_scores;
    std::vector<Label> truths;
    for (const auto& [source, set] : test_sets) {
      std::vector<Label> predictions, expected;
      for (const TextSample& sample : set) {
        const Label verdict = zero_shot_detect(sample, *judge);
        predictions.push_back(verdict);
        expected.push_back(*sample.label);
        verdict_scores.push_back(verdict == Label::machine ? 1.0 : 0.0);
        truths.push_back(*sample.label);
      }
      baseline["per_dataset_accuracy"][source] = accuracy(predictions, expected);
    }
    const bool both =
        std::find(truths.begin(), truths.end(), Label::human) != truths.end() &&
        std::find(truths.begin(), truths.end(), Label::machine) != truths.end();
    baseline["aggregate_auroc"] =
        both ? json(auroc(verdict_scores, truths)) : json(nullptr);
    report_json["baseline"] = baseline;
  }

  const fs::path report_path = options.report_path.empty()
                                   ? fs::path(options.out_dir) / "report.json"
                                   : fs::path(options.report_path);
  {
    std::ofstream out(report_path, std::ios::trunc);
    out << report_json.dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(options.out_dir) / "report.txt", std::ios::trunc);
    out << report.to_table();
  }

  if (!options.histogram_path.empty()) {
    std::vector<double> means;
    std::vector<Label> labels;
    const std::vector<SimilarityRecord> records = get_similarity_batch(
        samples, config, *providers.denoiser, *providers.embedder);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      means.push_back(records[i].mean);
      labels.push_back(*samples[i].label);
    }
    std::ofstream out(options.histogram_path, std::ios::trunc);
    out << similarity_histograms(model, means, labels).dump(2) << '\n';
  }

  write_manifest(options, "eval", {options.data_path, options.model_path});
  std::cout << report.to_table();
  return 0;
}

int cmd_baseline(const Options& options) {
  ensure_out_dir(options);
  const fs::path out_path =
      fs::path(options.out_dir) /
      ("baseline_" + options.baseline_method + ".jsonl");

  if (options.baseline_method == "perplexity") {
    std::ifstream in(options.data_path);
    if (!in) throw DataError("cannot open " + options.data_path);
    std::ofstream out(out_path, std::ios::trunc);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      TokenLogProbs lp;
      try {
        lp = token_log_probs_from_json(json::parse(line));
      } catch (const json::exception& e) {
        throw ParseError(options.data_path + ":" + std::to_string(line_number) +
                         ": " + e.what());
      }
      out << json{{"line", line_number}, {"perplexity", perplexity(lp)}}.dump()
          << '\n';
    }
    write_manifest(options, "baseline", {options.data_path});
    return 0;
  }

  const std::vector<TextSample> samples = load_dataset(options.data_path);

  if (options.baseline_method == "zeroshot") {
    std::shared_ptr<ChatCompleter> judge;
    std::shared_ptr<ResponseCache> chat_cache;
    if (options.provider == "mock") {
      auto mock_judge = std::make_shared<MockJudgeChat>();
      for (const TextSample& sample : samples) {
        mock_judge->register_text(sample.text,
                                  sample.label.value_or(Label::human));
      }
      judge = mock_judge;
    } else {
      judge = make_remote_chat(options, chat_cache, 0.0);
    }
    std::ofstream out(out_path, std::ios::trunc);
    std::vector<Label> predictions, truths;
    for (const TextSample& sample : samples) {
      const Label verdict = zero_shot_detect(sample, *judge);
      out << json{{"id", sample.id}, {"label", to_string(verdict)}}.dump()
          << '\n';
      if (sample.label) {
        predictions.push_back(verdict);
        truths.push_back(*sample.label);
      }
    }
    if (!truths.empty()) {
      std::cout << "zero-shot accuracy over " << truths.size()
                << " labeled samples: " << accuracy(predictions, truths) << "\n";
    }
    write_manifest(options, "baseline", {options.data_path});
    return 0;
  }

  if (options.baseline_method == "bscore") {
    NGramSpec spec;
    spec.min_n = options.ngram_min;
    spec.max_n = options.ngram_max;
    spec.repetitions = options.bscore_k;
    spec.validate();

    std::shared_ptr<ChatCompleter> regenerator;
    std::shared_ptr<MockRegeneratorChat> mock;
    std::shared_ptr<ResponseCache> chat_cache;
    if (options.provider == "mock") {
      mock = std::make_shared<MockRegeneratorChat>();
      regenerator = mock;
    } else {
      // continuations need diversity across the K draws
      regenerator = make_remote_chat(options, chat_cache, 1.0);
    }

    std::ofstream out(out_path, std::ios::trunc);
    std::vector<double> scores;
    std::vector<Label> truths;
    bool all_labeled = true;
    for (const TextSample& sample : samples) {
      const SplitText split =
          split_for_bscore(sample.text, options.tail_fraction);
      if (mock) {
        mock->register_context(split.s1, split.s2,
                               mock_recovery_for(options, sample));
      }
      const std::vector<std::string> continuations = sample_continuations(
          split.s1, spec.repetitions, *regenerator,
          derive_seed(options.seed, sample.id, 1));
      const double score = bscore(split.s2, continuations, spec);
      out << json{{"id", sample.id}, {"bscore", score}}.dump() << '\n';
      if (sample.label) {
        scores.push_back(score);
        truths.push_back(*sample.label);
      } else {
        all_labeled = false;
      }
    }
    const bool both =
        std::find(truths.begin(), truths.end(), Label::human) != truths.end() &&
        std::find(truths.begin(), truths.end(), Label::machine) != truths.end();
    if (all_labeled && both) {
      std::cout << "bscore AUROC over " << truths.size()
                << " labeled samples: " << auroc(scores, truths) << "\n";
    }
    write_manifest(options, "baseline", {options.data_path});
    return 0;
  }

  throw ConfigError("unknown baseline method '" + options.baseline_method + "'");
}

int cmd_synth(const Options& options) {
  ensure_out_dir(options);
  SyntheticCorpusSpec spec;
  spec.n_human = options.n_human;
  spec.n_machine = options.n_machine;
  spec.vocabulary_size = options.vocabulary;
  spec.words_per_sample = options.words_per_sample;
  spec.machine_recovery = options.mock_recovery_machine;
  spec.human_recovery = options.mock_recovery_human;
  spec.seed = options.seed;
  spec.embed_dimension = options.embed_dim;

  const SyntheticCorpus corpus = generate_synthetic_corpus(spec);
  const fs::path corpus_path = fs::path(options.out_dir) / "corpus.jsonl";
  save_dataset(corpus_path, corpus.samples);
  write_manifest(options, "synth", {});
  std::cout << "wrote " << corpus.samples.size() << " samples to "
            << corpus_path.string() << "\n";
  return 0;
}

int exit_code_for(const std::exception& error) {
  if (const auto* batch = dynamic_cast<const BatchError*>(&error)) {
    switch (batch->kind()) {
      case BatchError::Kind::provider: return 3;
      case BatchError::Kind::config: return 2;
      case BatchError::Kind::data: return 4;
      case BatchError::Kind::other: return 1;
    }
  }
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const ProviderError*>(&error) != nullptr) return 3;
  if (dynamic_cast<const DataError*>(&error) != nullptr) return 4;
  return 1;
}

void add_pipeline_flags(CLI::App* cmd, Options& options) {
  cmd->add_option("--alpha", options.alpha, "masking ratio in (0,1)");
  cmd->add_option("--beta", options.beta, "repetitions averaged per sample");
  cmd->add_option("--seed", options.seed, "global random seed");
  cmd->add_option("--mask-token", options.mask_token, "mask token string");
  cmd->add_option("--concurrency", options.concurrency,
                  "maximum concurrent provider requests");
  cmd->add_option("--provider", options.provider, "provider set: mock or remote");
  cmd->add_option("--mock-recovery-machine", options.mock_recovery_machine,
                  "mock word-recovery probability for machine samples");
  cmd->add_option("--mock-recovery-human", options.mock_recovery_human,
                  "mock word-recovery probability for human samples");
  cmd->add_option("--embed-dim", options.embed_dim, "mock embedder dimension");
  cmd->add_option("--cache-dir", options.cache_dir,
                  "response cache directory (remote provider)");
  cmd->add_option("--chat-model", options.chat_model, "remote chat model name");
  cmd->add_option("--embed-model", options.embed_model,
                  "remote embedding model name");
  cmd->add_option("--out-dir", options.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box machine-generated text detector"};
  app.require_subcommand(1);

  Options options;

  CLI::App* train = app.add_subcommand("train", "fit a detector model");
  add_pipeline_flags(train, options);
  train->add_option("--data", options.data_path, "labeled training JSONL")
      ->required();
  train->add_option("--lambda-grid-min", options.lambda_min, "grid lower bound");
  train->add_option("--lambda-grid-max", options.lambda_max, "grid upper bound");
  train->add_option("--lambda-grid-count", options.lambda_count, "grid size");
  train->add_option("--train-per-dataset", options.train_per_dataset,
                    "split the corpus: train on this many samples per source, "
                    "write the rest to holdout.jsonl");

  CLI::App* detect = app.add_subcommand("detect", "classify unlabeled samples");
  add_pipeline_flags(detect, options);
  detect->add_option("--data", options.data_path, "input JSONL")->required();
  detect->add_option("--model", options.model_path, "model file")->required();

  CLI::App* eval = app.add_subcommand("eval", "score a model on labeled data");
  add_pipeline_flags(eval, options);
  eval->add_option("--data", options.data_path, "labeled test JSONL")->required();
  eval->add_option("--model", options.model_path, "model file")->required();
  eval->add_option("--report-path", options.report_path,
                   "where to write the JSON report");
  eval->add_option("--histogram-path", options.histogram_path,
                   "export binned similarity counts to this file");
  eval->add_option("--baseline", options.eval_baseline,
                   "include a baseline column (zeroshot)");

  CLI::App* baseline = app.add_subcommand("baseline", "run a reference detector");
  add_pipeline_flags(baseline, options);
  baseline->add_option("--method", options.baseline_method,
                       "perplexity, bscore or zeroshot")
      ->required();
  baseline->add_option("--data", options.data_path, "input JSONL")->required();
  baseline->add_option("--tail-fraction", options.tail_fraction,
                       "share of words forming S2 for bscore");
  baseline->add_option("--ngram-min", options.ngram_min, "smallest n-gram order");
  baseline->add_option("--ngram-max", options.ngram_max, "largest n-gram order");
  baseline->add_option("--bscore-k", options.bscore_k,
                       "continuation draws per sample");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_pipeline_flags(synth, options);
  synth->add_option("--n-human", options.n_human, "human-labeled samples");
  synth->add_option("--n-machine", options.n_machine, "machine-labeled samples");
  synth->add_option("--vocab", options.vocabulary, "vocabulary size");
  synth->add_option("--words", options.words_per_sample, "words per sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& parse_error) {
    app.exit(parse_error);
    return 2;  // bad flags are configuration errors
  }

  try {
    if (train->parsed()) {
      return cmd_train(options, train->count("--train-per-dataset") > 0);
    }
    if (detect->parsed()) {
      return cmd_detect(options, detect->count("--alpha") > 0,
                        detect->count("--beta") > 0);
    }
    if (eval->parsed()) return cmd_eval(options);
    if (baseline->parsed()) return cmd_baseline(options);
    if (synth->parsed()) return cmd_synth(options);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return exit_code_for(error);
  }
  return 0;
}
