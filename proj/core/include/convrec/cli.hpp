#pragma once

#include <memory>
#include <string>
#include <vector>

#include "convrec/config.hpp"
#include "convrec/engine.hpp"
#include "convrec/gateway.hpp"
#include "convrec/prompts.hpp"
#include "convrec/recommender.hpp"
#include "convrec/summarize.hpp"

namespace convrec::cli {

// Backends, gateway and shared caches assembled per the config.
struct Services {
  std::shared_ptr<Clock> clock;
  std::shared_ptr<Gateway> gateway;
  std::shared_ptr<EmbeddingCache> embedding_cache;
  PromptTemplates templates;
};

Services make_services(const PipelineConfig& config);

// Stage entry points. Each is idempotent: when its outputs exist and the
// input hash recorded in the stage report still matches, it returns
// without touching the gateway. Missing upstream outputs raise UsageError.
void cmd_ingest(const PipelineConfig& config);
void cmd_abstract(const PipelineConfig& config);
void cmd_generate(const PipelineConfig& config, bool resume = true);
void cmd_filter(const PipelineConfig& config);

struct StatsOptions {
  std::string corpus_path;  // defaults to the filter (or engine) output
  std::string format = "native";
  std::string episodes_path;
};
void cmd_stats(const PipelineConfig& config, const StatsOptions& options = {});

void cmd_all(const PipelineConfig& config);

// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace convrec::cli
