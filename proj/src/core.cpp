#include "authentigpt/core.hpp"

#include "authentigpt/hash.hpp"

namespace authentigpt {

std::string to_string(Label label) {
  return label == Label::human ? "human" : "machine";
}

Label label_from_string(std::string_view text) {
  if (text == "human") return Label::human;
  if (text == "machine") return Label::machine;
  throw ParseError("unknown label '" + std::string(text) +
                   "' (expected \"human\" or \"machine\")");
}

void PipelineConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidRatioError("alpha must be in (0,1), got " + std::to_string(alpha));
  }
  if (beta < 1) {
    throw ConfigError("beta must be >= 1, got " + std::to_string(beta));
  }
  if (mask_token.empty()) {
    throw ConfigError("mask token must be nonempty");
  }
  if (max_concurrent_requests < 1) {
    throw ConfigError("max_concurrent_requests must be >= 1");
  }
}

namespace {

void append_u64_le(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id,
                          int repetition) {
  std::string material;
  material.reserve(sample_id.size() + 18);
  append_u64_le(material, global_seed);
  material.push_back('\x1d');
  material.append(sample_id);
  material.push_back('\x1d');
  append_u64_le(material, static_cast<std::uint64_t>(repetition));
  // One extra mixing round so nearby repetitions land far apart.
  return SplitMix64(fnv1a64(material)).next();
}

// --- serialization ---------------------------------------------------------

json to_json(const TextSample& sample) {
  json value{{"id", sample.id}, {"text", sample.text}};
  if (sample.label) value["label"] = to_string(*sample.label);
  if (sample.source) value["source"] = *sample.source;
  return value;
}

TextSample sample_from_json(const json& value) {
  if (!value.is_object()) throw ParseError("sample must be a JSON object");
  if (!value.contains("id") || !value["id"].is_string()) {
    throw ParseError("sample missing string field \"id\"");
  }
  if (!value.contains("text") || !value["text"].is_string()) {
    throw ParseError("sample missing string field \"text\"");
  }
  TextSample sample;
  sample.id = value["id"].get<std::string>();
  sample.text = value["text"].get<std::string>();
  if (sample.id.empty()) throw ParseError("sample id must be nonempty");
  if (value.contains("label") && !value["label"].is_null()) {
    if (!value["label"].is_string()) throw ParseError("label must be a string");
    sample.label = label_from_string(value["label"].get<std::string>());
  }
  if (value.contains("source") && !value["source"].is_null()) {
    if (!value["source"].is_string()) throw ParseError("source must be a string");
    sample.source = value["source"].get<std::string>();
  }
  return sample;
}

json to_json(const SimilarityRecord& record) {
  return json{{"id", record.sample_id},
              {"mean", record.mean},
              {"per_repetition", record.per_repetition}};
}

SimilarityRecord similarity_record_from_json(const json& value) {
  SimilarityRecord record;
  record.sample_id = value.at("id").get<std::string>();
  record.mean = value.at("mean").get<double>();
  record.per_repetition = value.at("per_repetition").get<std::vector<double>>();
  return record;
}

namespace {

std::array<double, 2> pair_from_json(const json& value, const char* key) {
  const json& arr = value.at(key);
  if (!arr.is_array() || arr.size() != 2) {
    throw ParseError(std::string("model field \"") + key +
                     "\" must be an array of two numbers");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

}  // namespace

json to_json(const DetectorModel& model) {
  return json{{"lambda", model.lambda},
              {"shift", model.shift},
              {"weights", model.gmm.weights},
              {"means", model.gmm.means},
              {"variances", model.gmm.variances},
              {"machine_component", model.machine_component},
              {"alpha", model.alpha},
              {"beta", model.beta}};
}

DetectorModel model_from_json(const json& value) {
  DetectorModel model;
  try {
    model.lambda = value.at("lambda").get<double>();
    model.shift = value.at("shift").get<double>();
    model.gmm.weights = pair_from_json(value, "weights");
    model.gmm.means = pair_from_json(value, "means");
    model.gmm.variances = pair_from_json(value, "variances");
    model.machine_component = value.at("machine_component").get<int>();
    model.alpha = value.at("alpha").get<double>();
    model.beta = value.at("beta").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad model file: ") + e.what());
  }
  if (model.machine_component != 0 && model.machine_component != 1) {
    throw ParseError("machine_component must be 0 or 1");
  }
  return model;
}

json to_json(const PipelineConfig& config) {
  return json{{"alpha", config.alpha},
              {"beta", config.beta},
              {"global_seed", config.global_seed},
              {"mask_token", config.mask_token},
              {"max_concurrent_requests", config.max_concurrent_requests}};
}

PipelineConfig pipeline_config_from_json(const json& value) {
  PipelineConfig config;
  try {
    config.alpha = value.at("alpha").get<double>();
    config.beta = value.at("beta").get<int>();
    config.global_seed = value.at("global_seed").get<std::uint64_t>();
    config.mask_token = value.at("mask_token").get<std::string>();
    config.max_concurrent_requests =
        value.at("max_concurrent_requests").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad pipeline config: ") + e.what());
  }
  return config;
}

}  // namespace authentigpt
