#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "convrec/engine.hpp"
#include "convrec/filters.hpp"
#include "convrec/gateway.hpp"
#include "convrec/gateway_remote.hpp"
#include "convrec/metrics.hpp"

namespace convrec {

struct BackendConfig {
  std::string mode = "mock";  // mock | remote
  RemoteEndpoint chat;
  RemoteEndpoint embedding;
  RemoteEndpoint nli;
  int requests_per_minute = 0;
  RetryPolicy retry;
  int mock_embedding_dim = 64;
  // Mock-only: inject a protocol defect into every Nth session.
  int mock_adversarial_period = 0;
};

struct GenerateConfig {
  int dialogues_per_user = 2;
  int limit_users = 0;  // 0 = all
};

struct PromptPathsConfig {
  std::string user_review;
  std::string item_reviews;
  std::string seeker;
  std::string recommender;
  std::string seed_seeker_text;       // inline overrides for the opening pair
  std::string seed_recommender_text;
};

struct PipelineConfig {
  std::string reviews_path;
  std::string items_path;
  std::string workdir = "work";

  BackendConfig backend;
  SessionConfig session;
  GenerateConfig generate;
  FilterConfig filter;
  MetricsConfig metrics;
  PromptPathsConfig prompts;

  double summarizer_temperature = 0.0;
  std::uint64_t seed = 1;
  int parallelism = 1;

  std::string user_db_path() const { return workdir + "/user_db.jsonl"; }
  std::string item_db_path() const { return workdir + "/item_db.jsonl"; }
  std::string user_db_abstracted_path() const {
    return workdir + "/user_db_abstracted.jsonl";
  }
  std::string item_db_abstracted_path() const {
    return workdir + "/item_db_abstracted.jsonl";
  }
  std::string abstract_cache_dir() const { return workdir + "/abstract_cache"; }
  std::string abstracts_path() const { return workdir + "/abstracts.jsonl"; }
  std::string ingest_report_path() const { return workdir + "/ingest_report.json"; }
  std::string abstract_report_path() const {
    return workdir + "/abstract_report.json";
  }
  std::string dialogues_path() const { return workdir + "/dialogues.jsonl"; }
  std::string run_report_path() const { return workdir + "/run_report.json"; }
  std::string kept_path() const { return workdir + "/kept.jsonl"; }
  std::string verdicts_path() const { return workdir + "/verdicts.jsonl"; }
  std::string filter_report_path() const {
    return workdir + "/filter_report.json";
  }
  std::string metrics_report_path() const {
    return workdir + "/metrics_report.json";
  }
  std::string metrics_table_path() const { return workdir + "/metrics_table.txt"; }

  PromptTemplates load_templates() const;

  // Fails fast on invalid values; path presence is checked per stage.
  void validate() const;

  nlohmann::json resolved() const;
};

// Reads a JSON config file; missing file or malformed content raises
// ConfigError naming the problem.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json(const nlohmann::json& j);

}  // namespace convrec
