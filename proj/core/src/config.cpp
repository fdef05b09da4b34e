#include "convrec/config.hpp"

#include <fstream>

#include "convrec/io.hpp"
#include "convrec/prompts.hpp"

namespace convrec {

namespace {

using nlohmann::json;

// The stock remote endpoints; overridable like everything else here.
RemoteEndpoint default_chat_endpoint() {
  return {"https://api.openai.com/v1/chat/completions", "gpt-3.5-turbo-1106",
          "CONVREC_API_KEY", 60000};
}

RemoteEndpoint default_embedding_endpoint() {
  return {"https://api.openai.com/v1/embeddings", "text-embedding-ada-002",
          "CONVREC_API_KEY", 60000};
}

RemoteEndpoint endpoint_from_json(const json& j, RemoteEndpoint defaults) {
  RemoteEndpoint e = std::move(defaults);
  e.url = j.value("url", e.url);
  e.model = j.value("model", e.model);
  e.api_key_env = j.value("api_key_env", e.api_key_env);
  e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
  return e;
}

json endpoint_to_json(const RemoteEndpoint& e) {
  return {{"url", e.url},
          {"model", e.model},
          {"api_key_env", e.api_key_env},
          {"timeout_ms", e.timeout_ms}};
}

}  // namespace

PromptTemplates PipelineConfig::load_templates() const {
  PromptTemplates templates = PromptTemplates::defaults();
  if (!prompts.user_review.empty()) {
    templates.user_review = load_prompt_file(prompts.user_review);
  }
  if (!prompts.item_reviews.empty()) {
    templates.item_reviews = load_prompt_file(prompts.item_reviews);
  }
  if (!prompts.seeker.empty()) {
    templates.seeker = load_prompt_file(prompts.seeker);
  }
  if (!prompts.recommender.empty()) {
    templates.recommender = load_prompt_file(prompts.recommender);
  }
  if (!prompts.seed_seeker_text.empty()) {
    templates.seed_seeker = prompts.seed_seeker_text;
  }
  if (!prompts.seed_recommender_text.empty()) {
    templates.seed_recommender = prompts.seed_recommender_text;
  }
  return templates;
}

void PipelineConfig::validate() const {
  if (backend.mode != "mock" && backend.mode != "remote") {
    throw ConfigError("backend.mode must be 'mock' or 'remote'");
  }
  if (workdir.empty()) throw ConfigError("missing config key 'workdir'");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (generate.dialogues_per_user < 1) {
    throw ConfigError("generate.dialogues_per_user must be >= 1");
  }
  if (backend.retry.attempts < 1) {
    throw ConfigError("backend.retry.attempts must be >= 1");
  }
  session.validate();
  filter.validate();
}

json PipelineConfig::resolved() const {
  json j;
  j["paths"] = {{"reviews", reviews_path},
                {"items", items_path},
                {"workdir", workdir}};
  j["backend"] = {{"mode", backend.mode},
                  {"chat", endpoint_to_json(backend.chat)},
                  {"embedding", endpoint_to_json(backend.embedding)},
                  {"nli", endpoint_to_json(backend.nli)},
                  {"requests_per_minute", backend.requests_per_minute},
                  {"retry",
                   {{"attempts", backend.retry.attempts},
                    {"backoff_base_ms", backend.retry.backoff_base_ms},
                    {"backoff_cap_ms", backend.retry.backoff_cap_ms},
                    {"jitter", backend.retry.jitter}}},
                  {"mock_embedding_dim", backend.mock_embedding_dim},
                  {"mock_adversarial_period", backend.mock_adversarial_period}};
  j["session"] = {{"k_schedule", session.k_schedule},
                  {"force_from_turn", session.force_from_turn},
                  {"max_utterances", session.max_utterances},
                  {"simulator_temperature", session.simulator_temperature},
                  {"max_tokens", session.max_tokens}};
  j["generate"] = {{"dialogues_per_user", generate.dialogues_per_user},
                   {"limit_users", generate.limit_users}};
  j["filter"] = {{"delta", filter.delta},
                 {"repetition_jaccard", filter.repetition_jaccard},
                 {"repetition_n", filter.repetition_n},
                 {"swap_nli_orientation", filter.swap_nli_orientation}};
  j["metrics"] = {{"specificity_ns", metrics.specificity_ns},
                  {"distinct_ns", metrics.distinct_ns},
                  {"recall_ks", metrics.recall_ks},
                  {"pair_sample_size", metrics.pair_sample_size},
                  {"with_similarity", metrics.with_similarity}};
  j["prompts"] = {{"user_review", prompts.user_review},
                  {"item_reviews", prompts.item_reviews},
                  {"seeker", prompts.seeker},
                  {"recommender", prompts.recommender}};
  j["summarizer_temperature"] = summarizer_temperature;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig config;
  config.backend.chat = default_chat_endpoint();
  config.backend.embedding = default_embedding_endpoint();

  if (j.contains("paths")) {
    const json& paths = j.at("paths");
    config.reviews_path = paths.value("reviews", "");
    config.items_path = paths.value("items", "");
    config.workdir = paths.value("workdir", config.workdir);
  }
  if (j.contains("backend")) {
    const json& b = j.at("backend");
    config.backend.mode = b.value("mode", config.backend.mode);
    if (b.contains("chat")) {
      config.backend.chat = endpoint_from_json(b.at("chat"), config.backend.chat);
    }
    if (b.contains("embedding")) {
      config.backend.embedding =
          endpoint_from_json(b.at("embedding"), config.backend.embedding);
    }
    if (b.contains("nli")) {
      config.backend.nli = endpoint_from_json(b.at("nli"), config.backend.nli);
    }
    config.backend.requests_per_minute =
        b.value("requests_per_minute", config.backend.requests_per_minute);
    if (b.contains("retry")) {
      const json& r = b.at("retry");
      config.backend.retry.attempts =
          r.value("attempts", config.backend.retry.attempts);
      config.backend.retry.backoff_base_ms =
          r.value("backoff_base_ms", config.backend.retry.backoff_base_ms);
      config.backend.retry.backoff_cap_ms =
          r.value("backoff_cap_ms", config.backend.retry.backoff_cap_ms);
      config.backend.retry.jitter = r.value("jitter", config.backend.retry.jitter);
    }
    config.backend.mock_embedding_dim =
        b.value("mock_embedding_dim", config.backend.mock_embedding_dim);
    config.backend.mock_adversarial_period = b.value(
        "mock_adversarial_period", config.backend.mock_adversarial_period);
  }
  if (j.contains("session")) {
    const json& s = j.at("session");
    if (s.contains("k_schedule")) {
      config.session.k_schedule = s.at("k_schedule").get<std::vector<int>>();
    }
    config.session.force_from_turn =
        s.value("force_from_turn", config.session.force_from_turn);
    config.session.max_utterances =
        s.value("max_utterances", config.session.max_utterances);
    config.session.simulator_temperature =
        s.value("simulator_temperature", config.session.simulator_temperature);
    config.session.max_tokens = s.value("max_tokens", config.session.max_tokens);
  }
  if (j.contains("generate")) {
    const json& g = j.at("generate");
    config.generate.dialogues_per_user =
        g.value("dialogues_per_user", config.generate.dialogues_per_user);
    config.generate.limit_users = g.value("limit_users", config.generate.limit_users);
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    config.filter.delta = f.value("delta", config.filter.delta);
    config.filter.repetition_jaccard =
        f.value("repetition_jaccard", config.filter.repetition_jaccard);
    config.filter.repetition_n = f.value("repetition_n", config.filter.repetition_n);
    config.filter.swap_nli_orientation =
        f.value("swap_nli_orientation", config.filter.swap_nli_orientation);
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    if (m.contains("specificity_ns")) {
      config.metrics.specificity_ns =
          m.at("specificity_ns").get<std::vector<int>>();
    }
    if (m.contains("distinct_ns")) {
      config.metrics.distinct_ns = m.at("distinct_ns").get<std::vector<int>>();
    }
    if (m.contains("recall_ks")) {
      config.metrics.recall_ks = m.at("recall_ks").get<std::vector<int>>();
    }
    config.metrics.pair_sample_size =
        m.value("pair_sample_size", config.metrics.pair_sample_size);
    config.metrics.with_similarity =
        m.value("with_similarity", config.metrics.with_similarity);
  }
  if (j.contains("prompts")) {
    const json& p = j.at("prompts");
    config.prompts.user_review = p.value("user_review", "");
    config.prompts.item_reviews = p.value("item_reviews", "");
    config.prompts.seeker = p.value("seeker", "");
    config.prompts.recommender = p.value("recommender", "");
    config.prompts.seed_seeker_text = p.value("seed_seeker_text", "");
    config.prompts.seed_recommender_text = p.value("seed_recommender_text", "");
  }
  config.summarizer_temperature =
      j.value("summarizer_temperature", config.summarizer_temperature);
  config.seed = j.value("seed", config.seed);
  config.parallelism = j.value("parallelism", config.parallelism);

  config.metrics.seed = config.seed;
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError("config file '" + path + "' is not valid JSON");
  }
  PipelineConfig config = config_from_json(j);
  config.validate();
  return config;
}

}  // namespace convrec
