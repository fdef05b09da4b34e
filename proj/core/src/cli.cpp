#include "convrec/cli.hpp"

#include <csignal>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "convrec/adapters.hpp"
#include "convrec/filters.hpp"
#include "convrec/gateway_mock.hpp"
#include "convrec/gateway_remote.hpp"
#include "convrec/io.hpp"
#include "convrec/metrics.hpp"
#include "convrec/seeker.hpp"
#include "convrec/text.hpp"

namespace convrec::cli {

namespace {

using nlohmann::json;

std::string hash_files(const std::vector<std::string>& paths) {
  std::uint64_t h = kFnvOffset;
  for (const std::string& path : paths) {
    h = fnv1a(io::read_file(path), h);
  }
  return hex64(h);
}

// A stage is up to date when its report exists and records the same input
// hash; re-running it then performs no work (and no gateway calls).
bool stage_fresh(const std::string& report_path, const std::string& input_hash) {
  if (!io::file_exists(report_path)) return false;
  json j = json::parse(io::read_file(report_path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  return j.value("input_hash", "") == input_hash;
}

void write_report(const std::string& path, const std::string& stage,
                  const PipelineConfig& config, const std::string& input_hash,
                  json report) {
  json j;
  j["header"] = io::make_header(stage, config.resolved());
  j["input_hash"] = input_hash;
  j["report"] = std::move(report);
  io::write_file_atomic(path, j.dump(2) + "\n");
}

void require_input(const std::string& path, const std::string& hint) {
  if (!io::file_exists(path)) {
    throw UsageError("missing '" + path + "' — run '" + hint + "' first");
  }
}

void require_config_key(const std::string& value, const std::string& key) {
  if (value.empty()) {
    throw ConfigError("missing config key '" + key + "'");
  }
}

volatile std::sig_atomic_t g_interrupted = 0;

void handle_interrupt(int) { g_interrupted = 1; }

}  // namespace

Services make_services(const PipelineConfig& config) {
  Services services;
  services.clock = std::make_shared<SystemClock>();
  services.templates = config.load_templates();

  std::shared_ptr<ChatBackend> chat;
  std::shared_ptr<EmbeddingBackend> embedding;
  std::shared_ptr<NliBackend> nli;
  if (config.backend.mode == "remote") {
    auto transport = std::shared_ptr<HttpTransport>(make_httplib_transport());
    chat = std::make_shared<RemoteChatBackend>(config.backend.chat, transport);
    embedding = std::make_shared<RemoteEmbeddingBackend>(
        config.backend.embedding, transport);
    if (!config.backend.nli.url.empty()) {
      nli = std::make_shared<RemoteNliBackend>(config.backend.nli, transport);
    } else {
      nli = std::make_shared<MockNliBackend>();
    }
  } else {
    MockChatOptions chat_options;
    chat_options.adversarial_period = config.backend.mock_adversarial_period;
    chat = std::make_shared<MockChatBackend>(chat_options);
    embedding =
        std::make_shared<MockEmbeddingBackend>(config.backend.mock_embedding_dim);
    nli = std::make_shared<MockNliBackend>();
  }

  GatewayOptions gateway_options;
  gateway_options.retry = config.backend.retry;
  gateway_options.requests_per_minute = config.backend.requests_per_minute;
  services.gateway = std::make_shared<Gateway>(chat, embedding, nli,
                                               gateway_options, services.clock);
  services.embedding_cache = std::make_shared<EmbeddingCache>();
  return services;
}

void cmd_ingest(const PipelineConfig& config) {
  require_config_key(config.reviews_path, "paths.reviews");
  require_config_key(config.items_path, "paths.items");
  require_input(config.reviews_path, "provide the reviews input file");
  require_input(config.items_path, "provide the items input file");

  const std::string input_hash =
      hash_files({config.reviews_path, config.items_path});
  if (stage_fresh(config.ingest_report_path(), input_hash)) {
    std::cerr << "ingest: up to date\n";
    return;
  }

  IngestResult result =
      ingest_review_files(config.reviews_path, config.items_path);
  json header = io::make_header("ingest", config.resolved());
  io::save_user_db(result.user_db, config.user_db_path(), header);
  io::save_item_db(result.item_db, config.item_db_path(), header);
  write_report(config.ingest_report_path(), "ingest", config, input_hash,
               io::ingest_report_to_json(result.report));
  std::cerr << "ingest: " << result.report.reviews_kept << " reviews, "
            << result.report.users << " users, " << result.report.items_kept
            << " items\n";
}

void cmd_abstract(const PipelineConfig& config) {
  require_input(config.user_db_path(), "ingest");
  require_input(config.item_db_path(), "ingest");

  const std::string input_hash =
      hash_files({config.user_db_path(), config.item_db_path()});
  if (stage_fresh(config.abstract_report_path(), input_hash)) {
    std::cerr << "abstract: up to date\n";
    return;
  }

  UserReviewDB user_db = io::load_user_db(config.user_db_path());
  ItemReviewDB item_db = io::load_item_db(config.item_db_path());

  Services services = make_services(config);
  SummarizerOptions options;
  options.temperature = config.summarizer_temperature;
  Summarizer summarizer(*services.gateway,
                        AbstractCache(config.abstract_cache_dir()),
                        services.templates, options);
  Summarizer::CorpusReport report =
      summarizer.abstract_corpus(user_db, item_db, config.parallelism);

  json header = io::make_header("abstract", config.resolved());
  io::save_user_db(user_db, config.user_db_abstracted_path(), header);
  io::save_item_db(item_db, config.item_db_abstracted_path(), header);

  // Line-delimited abstract export keyed by review id.
  {
    std::string content = header.dump() + "\n";
    for (const auto& [user_id, reviews] : user_db.users) {
      for (const Review& r : reviews) {
        if (!r.abstract) continue;
        json j;
        j["kind"] = "abstract";
        j["review_id"] = review_id(r);
        j["abstract"] = io::abstract_to_json(*r.abstract);
        content += j.dump() + "\n";
      }
    }
    for (const auto& [item_id, entry] : item_db.items) {
      if (!entry.knowledge) continue;
      json j;
      j["kind"] = "item-abstract";
      j["item_id"] = item_id;
      j["abstract"] = io::abstract_to_json(*entry.knowledge);
      content += j.dump() + "\n";
    }
    io::write_file_atomic(config.abstracts_path(), content);
  }

  json rj;
  rj["reviews_abstracted"] = report.reviews_abstracted;
  rj["reviews_failed"] = report.reviews_failed;
  rj["items_abstracted"] = report.items_abstracted;
  rj["items_failed"] = report.items_failed;
  write_report(config.abstract_report_path(), "abstract", config, input_hash,
               std::move(rj));
  std::cerr << "abstract: " << report.reviews_abstracted << " reviews, "
            << report.items_abstracted << " items\n";
}

void cmd_generate(const PipelineConfig& config, bool resume) {
  require_input(config.user_db_abstracted_path(), "abstract");
  require_input(config.item_db_abstracted_path(), "abstract");

  UserReviewDB user_db = io::load_user_db(config.user_db_abstracted_path());
  ItemReviewDB item_db = io::load_item_db(config.item_db_abstracted_path());

  std::vector<std::string> user_ids;
  for (const auto& [user_id, reviews] : user_db.users) user_ids.push_back(user_id);
  if (config.generate.limit_users > 0 &&
      user_ids.size() > static_cast<std::size_t>(config.generate.limit_users)) {
    user_ids.resize(static_cast<std::size_t>(config.generate.limit_users));
  }

  std::set<std::string> completed;
  if (resume && io::file_exists(config.dialogues_path())) {
    for (const json& j : io::read_jsonl(config.dialogues_path())) {
      if (j.value("kind", "") == "dialogue") {
        completed.insert(j.at("dialogue_id").get<std::string>());
      }
    }
  } else if (!resume && io::file_exists(config.dialogues_path())) {
    std::remove(config.dialogues_path().c_str());
  }

  Services services = make_services(config);
  SeekerSim seeker(*services.gateway, services.templates,
                   config.session.simulator_temperature,
                   config.session.max_tokens);
  RecommenderSim recommender(*services.gateway, services.templates,
                             config.session.simulator_temperature,
                             config.session.max_tokens);
  EngineDeps deps{*services.gateway, *services.embedding_cache, seeker,
                  recommender, services.templates};

  json header = io::make_header("generate", config.resolved());
  io::JsonlWriter writer(config.dialogues_path(), header);

  BatchOptions batch_options;
  batch_options.parallelism = config.parallelism;

  RunReport report = run_batch(
      user_ids, config.generate.dialogues_per_user, user_db, item_db, deps,
      config.session, config.seed, batch_options, completed,
      [&](const Dialogue& dialogue) {
        writer.write(io::dialogue_to_json(dialogue));
        if (g_interrupted) writer.flush();
      });
  writer.flush();

  write_report(config.run_report_path(), "generate", config, "",
               io::run_report_to_json(report));
  std::cerr << "generate: " << report.dialogues_emitted << " dialogues ("
            << report.sessions_resumed << " resumed)\n";
}

void cmd_filter(const PipelineConfig& config) {
  require_input(config.dialogues_path(), "generate");

  const std::string input_hash = hash_files({config.dialogues_path()});
  if (stage_fresh(config.filter_report_path(), input_hash)) {
    std::cerr << "filter: up to date\n";
    return;
  }

  std::vector<Dialogue> dialogues;
  for (const json& j : io::read_jsonl(config.dialogues_path())) {
    if (j.value("kind", "") == "dialogue") {
      dialogues.push_back(io::dialogue_from_json(j));
    }
  }

  Services services = make_services(config);
  NliFn nli = [&](const std::string& premise, const std::string& hypothesis) {
    return services.gateway->nli(premise, hypothesis);
  };
  FilterOutcome outcome =
      apply_filters(dialogues, nli, config.filter, config.parallelism);

  json header = io::make_header("filter", config.resolved());
  std::string verdicts = header.dump() + "\n";
  for (const FilterVerdict& v : outcome.verdicts) {
    verdicts += io::verdict_to_json(v).dump() + "\n";
  }
  io::write_file_atomic(config.verdicts_path(), verdicts);

  std::set<std::string> kept_ids;
  for (const FilterVerdict& v : outcome.verdicts) {
    if (v.passed) kept_ids.insert(v.dialogue_id);
  }
  std::string kept = header.dump() + "\n";
  for (const Dialogue& d : dialogues) {
    if (kept_ids.count(d.dialogue_id)) {
      kept += io::dialogue_to_json(d).dump() + "\n";
    }
  }
  io::write_file_atomic(config.kept_path(), kept);

  json rj = io::filter_report_to_json(outcome.report);
  rj["held_ids"] = outcome.held_ids;
  write_report(config.filter_report_path(), "filter", config, input_hash,
               std::move(rj));
  std::cerr << "filter: kept " << outcome.report.kept << "/"
            << outcome.report.total << " (removal rate "
            << outcome.report.removal_rate << ")\n";
}

void cmd_stats(const PipelineConfig& config, const StatsOptions& options) {
  std::string corpus_path = options.corpus_path;
  CorpusFormat format = corpus_format_from_string(options.format);
  if (corpus_path.empty()) {
    if (io::file_exists(config.kept_path())) {
      corpus_path = config.kept_path();
    } else if (io::file_exists(config.dialogues_path())) {
      corpus_path = config.dialogues_path();
    } else {
      throw UsageError("no corpus available — run 'generate' (and 'filter') "
                       "first or pass --corpus");
    }
    format = CorpusFormat::kNative;
  }

  const std::string input_hash = hash_files({corpus_path});
  if (stage_fresh(config.metrics_report_path(), input_hash)) {
    std::cerr << "stats: up to date\n";
    std::cout << io::read_file(config.metrics_table_path());
    return;
  }

  std::vector<TranscriptDialogue> corpus = load_corpus(corpus_path, format);
  if (corpus.empty()) throw UsageError("corpus '" + corpus_path + "' is empty");

  std::vector<RankedEpisode> episodes;
  if (!options.episodes_path.empty()) {
    episodes = load_episodes(options.episodes_path);
  }

  Services services = make_services(config);
  MetricsReport report =
      compute_metrics(corpus, config.metrics, services.gateway.get(),
                      episodes.empty() ? nullptr : &episodes);

  // Native corpora carry user/item ids worth counting.
  if (format == CorpusFormat::kNative) {
    std::set<std::string> users, items;
    for (const json& j : io::read_jsonl(corpus_path)) {
      if (j.value("kind", "") != "dialogue") continue;
      users.insert(j.at("user_id").get<std::string>());
      items.insert(j.at("target_item_id").get<std::string>());
    }
    report.users = users.size();
    report.items = items.size();
  }

  write_report(config.metrics_report_path(), "stats", config, input_hash,
               io::metrics_report_to_json(report));
  std::string table = format_metrics_table(report);
  io::write_file_atomic(config.metrics_table_path(), table);
  std::cout << table;
}

void cmd_all(const PipelineConfig& config) {
  cmd_ingest(config);
  cmd_abstract(config);
  cmd_generate(config);
  cmd_filter(config);
  cmd_stats(config);
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Review-grounded conversational recommendation dialogue "
               "synthesis pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> parallelism_override;
  std::optional<std::string> backend_override;
  std::optional<int> limit_users_override;
  bool resume = true;

  app.add_option("--config", config_path, "Pipeline config file (JSON)");
  app.add_option("--seed", seed_override, "Override the global seed");
  app.add_option("--parallelism", parallelism_override,
                 "Override the worker count");
  app.add_option("--backend", backend_override, "Backend mode: mock|remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--limit-users", limit_users_override,
                 "Generate for the first N users only");
  app.add_flag("--resume,!--no-resume", resume,
               "Resume generation from existing output (default on)");

  StatsOptions stats_options;
  CLI::App* ingest = app.add_subcommand("ingest", "Build the review databases");
  CLI::App* abstract_cmd =
      app.add_subcommand("abstract", "Distill reviews into like/dislike abstracts");
  CLI::App* generate = app.add_subcommand("generate", "Run dialogue sessions");
  CLI::App* filter = app.add_subcommand("filter", "Apply the filtering cascade");
  CLI::App* stats = app.add_subcommand("stats", "Compute corpus metrics");
  stats->add_option("--corpus", stats_options.corpus_path,
                    "Corpus file (defaults to the pipeline output)");
  stats->add_option("--format", stats_options.format,
                    "Corpus format: native|transcript|redial|inspired")
      ->check(CLI::IsMember({"native", "transcript", "redial", "inspired"}));
  stats->add_option("--episodes", stats_options.episodes_path,
                    "Ranked-episode file for recall@k");
  CLI::App* all = app.add_subcommand("all", "Run every stage in order");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::signal(SIGINT, handle_interrupt);

  try {
    PipelineConfig config =
        config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (parallelism_override) config.parallelism = *parallelism_override;
    if (backend_override) config.backend.mode = *backend_override;
    if (limit_users_override) config.generate.limit_users = *limit_users_override;
    config.metrics.seed = config.seed;
    config.validate();

    if (ingest->parsed()) cmd_ingest(config);
    if (abstract_cmd->parsed()) cmd_abstract(config);
    if (generate->parsed()) cmd_generate(config, resume);
    if (filter->parsed()) cmd_filter(config);
    if (stats->parsed()) cmd_stats(config, stats_options);
    if (all->parsed()) cmd_all(config);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace convrec::cli
