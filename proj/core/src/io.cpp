#include "convrec/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "convrec/util.hpp"

namespace convrec::io {

namespace {
using nlohmann::json;
namespace fs = std::filesystem;

json optional_string(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<std::string> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

json make_header(const std::string& stage, const json& resolved_config) {
  json header;
  header["kind"] = "header";
  header["stage"] = stage;
  header["format_version"] = 1;
  header["config"] = resolved_config;
  return header;
}

struct JsonlWriter::Impl {
  std::ofstream out;
};

JsonlWriter::JsonlWriter(const std::string& path, const json& header)
    : impl_(std::make_unique<Impl>()) {
  ensure_parent_dir(path);
  bool write_header = true;
  if (fs::exists(path) && fs::file_size(path) > 0) write_header = false;
  impl_->out.open(path, std::ios::app);
  if (!impl_->out.good()) {
    throw ConfigError("cannot open output file '" + path + "'");
  }
  if (write_header) {
    impl_->out << header.dump() << "\n";
    impl_->out.flush();
  }
}

JsonlWriter::~JsonlWriter() = default;

void JsonlWriter::write(const json& record) {
  impl_->out << record.dump() << "\n";
}

void JsonlWriter::flush() { impl_->out.flush(); }

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw ConfigError("cannot open input file '" + path + "'");
  }
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": invalid JSON");
    }
    if (j.is_object() && j.value("kind", "") == "header") continue;
    records.push_back(std::move(j));
  }
  return records;
}

bool file_exists(const std::string& path) { return fs::exists(path); }

void ensure_parent_dir(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::string tmp = path + ".tmp." + hex64(fnv1a(content) ^
                                           static_cast<std::uint64_t>(
                                               ::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out.good()) throw ConfigError("cannot write temp file '" + tmp + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open file '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

json abstract_to_json(const Abstract& abstract) {
  json j;
  j["like"] = optional_string(abstract.like);
  j["dislike"] = optional_string(abstract.dislike);
  j["source_ids"] = abstract.source_ids;
  return j;
}

Abstract abstract_from_json(const json& j) {
  Abstract a;
  a.like = optional_from(j, "like");
  a.dislike = optional_from(j, "dislike");
  if (j.contains("source_ids")) {
    a.source_ids = j.at("source_ids").get<std::vector<std::string>>();
  }
  return a;
}

json persona_to_json(const Persona& persona) {
  json j;
  j["user_id"] = persona.user_id;
  j["seed"] = persona.seed;
  j["target_item_id"] = persona.target_item_id;
  j["target_title"] = persona.target_title;
  j["target_rating"] = persona.target_rating;
  j["target_abstract"] = abstract_to_json(persona.target_abstract);
  json general = json::array();
  for (const PersonaReview& r : persona.general) {
    json g;
    g["item_id"] = r.item_id;
    g["title"] = r.title;
    g["rating"] = r.rating;
    g["abstract"] = abstract_to_json(r.abstract);
    general.push_back(std::move(g));
  }
  j["general"] = std::move(general);
  return j;
}

Persona persona_from_json(const json& j) {
  Persona p;
  p.user_id = j.at("user_id").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.target_item_id = j.at("target_item_id").get<std::string>();
  p.target_title = j.at("target_title").get<std::string>();
  p.target_rating = j.at("target_rating").get<int>();
  p.target_abstract = abstract_from_json(j.at("target_abstract"));
  for (const json& g : j.at("general")) {
    PersonaReview r;
    r.item_id = g.at("item_id").get<std::string>();
    r.title = g.at("title").get<std::string>();
    r.rating = g.at("rating").get<int>();
    r.abstract = abstract_from_json(g.at("abstract"));
    p.general.push_back(std::move(r));
  }
  return p;
}

json dialogue_to_json(const Dialogue& dialogue) {
  json j;
  j["kind"] = "dialogue";
  j["dialogue_id"] = dialogue.dialogue_id;
  j["user_id"] = dialogue.user_id;
  j["target_item_id"] = dialogue.target_item_id;
  j["seed"] = dialogue.seed;
  j["outcome"] = dialogue.outcome.label();
  j["chat_backend"] = dialogue.chat_backend;
  j["embedding_backend"] = dialogue.embedding_backend;
  j["persona"] = persona_to_json(dialogue.persona);

  json turns = json::array();
  for (const DialogueTurn& t : dialogue.turns) {
    json tj;
    tj["role"] = t.seeker ? "seeker" : "recommender";
    tj["text"] = t.text;
    if (t.seeker) {
      tj["terminal"] = t.terminal;
      if (t.accepted_item_id) tj["accepted_item_id"] = *t.accepted_item_id;
    } else {
      if (!t.think.empty()) tj["think"] = t.think;
      if (t.movie_id) tj["movie_id"] = *t.movie_id;
      if (t.movie_line) tj["movie_line"] = *t.movie_line;
      if (t.candidates) {
        json cj;
        cj["k"] = t.candidates->k;
        cj["target_forced"] = t.candidates->target_forced;
        json ranked = json::array();
        for (const auto& entry : t.candidates->ranked) {
          ranked.push_back({{"item_id", entry.item_id}, {"score", entry.score}});
        }
        cj["ranked"] = std::move(ranked);
        tj["candidates"] = std::move(cj);
      }
    }
    turns.push_back(std::move(tj));
  }
  j["turns"] = std::move(turns);
  return j;
}

Dialogue dialogue_from_json(const json& j) {
  Dialogue d;
  d.dialogue_id = j.at("dialogue_id").get<std::string>();
  d.user_id = j.at("user_id").get<std::string>();
  d.target_item_id = j.at("target_item_id").get<std::string>();
  d.seed = j.at("seed").get<std::uint64_t>();
  d.chat_backend = j.value("chat_backend", "");
  d.embedding_backend = j.value("embedding_backend", "");
  d.persona = persona_from_json(j.at("persona"));

  std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "accepted-target") {
    d.outcome = {OutcomeKind::kAcceptedTarget, ""};
  } else if (outcome == "max-turns") {
    d.outcome = {OutcomeKind::kMaxTurns, ""};
  } else if (outcome.starts_with("aborted:")) {
    d.outcome = {OutcomeKind::kAborted, outcome.substr(8)};
  } else {
    d.outcome = {OutcomeKind::kAborted, ""};
  }

  for (const json& tj : j.at("turns")) {
    DialogueTurn t;
    t.seeker = tj.at("role").get<std::string>() == "seeker";
    t.text = tj.at("text").get<std::string>();
    if (t.seeker) {
      t.terminal = tj.value("terminal", false);
      t.accepted_item_id = optional_from(tj, "accepted_item_id");
    } else {
      t.think = tj.value("think", "");
      t.movie_id = optional_from(tj, "movie_id");
      t.movie_line = optional_from(tj, "movie_line");
      if (tj.contains("candidates")) {
        CandidateAudit audit;
        const json& cj = tj.at("candidates");
        audit.k = cj.at("k").get<int>();
        audit.target_forced = cj.at("target_forced").get<bool>();
        for (const json& rj : cj.at("ranked")) {
          audit.ranked.push_back({rj.at("item_id").get<std::string>(),
                                  rj.at("score").get<double>()});
        }
        t.candidates = std::move(audit);
      }
    }
    d.turns.push_back(std::move(t));
  }
  return d;
}

json verdict_to_json(const FilterVerdict& verdict) {
  json j;
  j["kind"] = "verdict";
  j["dialogue_id"] = verdict.dialogue_id;
  j["passed"] = verdict.passed;
  j["failed_rules"] = verdict.failed_rules;
  json evidence = json::object();
  for (const auto& [rule, items] : verdict.evidence) {
    json list = json::array();
    for (const RuleEvidence& e : items) {
      json ej;
      ej["turn_a"] = e.turn_a;
      if (e.turn_b >= 0) ej["turn_b"] = e.turn_b;
      if (!e.detail.empty()) ej["detail"] = e.detail;
      if (e.score != 0.0) ej["score"] = e.score;
      list.push_back(std::move(ej));
    }
    evidence[rule] = std::move(list);
  }
  j["evidence"] = std::move(evidence);
  return j;
}

FilterVerdict verdict_from_json(const json& j) {
  FilterVerdict v;
  v.dialogue_id = j.at("dialogue_id").get<std::string>();
  v.passed = j.at("passed").get<bool>();
  v.failed_rules = j.at("failed_rules").get<std::vector<std::string>>();
  if (j.contains("evidence")) {
    for (const auto& [rule, list] : j.at("evidence").items()) {
      std::vector<RuleEvidence> items;
      for (const json& ej : list) {
        RuleEvidence e;
        e.turn_a = ej.value("turn_a", -1);
        e.turn_b = ej.value("turn_b", -1);
        e.detail = ej.value("detail", "");
        e.score = ej.value("score", 0.0);
        items.push_back(std::move(e));
      }
      v.evidence[rule] = std::move(items);
    }
  }
  return v;
}

json ingest_report_to_json(const IngestReport& report) {
  json j;
  j["kind"] = "ingest-report";
  j["reviews_in"] = report.reviews_in;
  j["reviews_kept"] = report.reviews_kept;
  j["reviews_deduped"] = report.reviews_deduped;
  j["reviews_dropped_unknown_item"] = report.reviews_dropped_unknown_item;
  j["items_kept"] = report.items_kept;
  j["users"] = report.users;
  auto errors = [](const std::vector<RecordError>& list) {
    json out = json::array();
    for (const RecordError& e : list) {
      out.push_back({{"line", e.line}, {"message", e.message}});
    }
    return out;
  };
  j["review_errors"] = errors(report.review_errors);
  j["item_errors"] = errors(report.item_errors);
  return j;
}

json run_report_to_json(const RunReport& report) {
  json j;
  j["kind"] = "run-report";
  j["sessions_planned"] = report.sessions_planned;
  j["sessions_resumed"] = report.sessions_resumed;
  j["dialogues_emitted"] = report.dialogues_emitted;
  j["users_ineligible"] = report.users_ineligible;
  j["transport_failures"] = report.transport_failures;
  j["outcomes"] = report.outcomes;
  json usage;
  usage["chat_requests"] = report.usage.chat_requests;
  usage["chat_attempts"] = report.usage.chat_attempts;
  usage["embed_requests"] = report.usage.embed_requests;
  usage["nli_requests"] = report.usage.nli_requests;
  usage["cache_hits"] = report.usage.cache_hits;
  usage["truncated_inputs"] = report.usage.truncated_inputs;
  usage["prompt_tokens"] = report.usage.prompt_tokens;
  usage["completion_tokens"] = report.usage.completion_tokens;
  j["usage"] = std::move(usage);
  return j;
}

json filter_report_to_json(const FilterReport& report) {
  json j;
  j["kind"] = "filter-report";
  j["total"] = report.total;
  j["kept"] = report.kept;
  j["removed"] = report.removed;
  j["held"] = report.held;
  j["removal_rate"] = report.removal_rate;
  j["failures_by_rule"] = report.failures_by_rule;
  return j;
}

json metrics_report_to_json(const MetricsReport& report) {
  json j;
  j["kind"] = "metrics-report";
  j["tokenizer"] = report.tokenizer;
  j["dialogues"] = report.dialogues;
  j["utterances"] = report.utterances;
  if (report.users > 0) j["users"] = report.users;
  if (report.items > 0) j["items"] = report.items;
  json spec = json::object();
  for (const auto& [n, v] : report.specificity) spec[std::to_string(n)] = v;
  j["specificity"] = std::move(spec);
  if (report.inter_dialogue_similarity) {
    j["inter_dialogue_similarity"] = *report.inter_dialogue_similarity;
  }
  j["avg_recommender_words"] = report.avg_recommender_words;
  json dist = json::object();
  for (const auto& [n, v] : report.distinct_n) dist[std::to_string(n)] = v;
  j["distinct_n"] = std::move(dist);
  json recall = json::object();
  for (const auto& [k, v] : report.recall_at_k) recall[std::to_string(k)] = v;
  j["recall_at_k"] = std::move(recall);
  return j;
}

void save_user_db(const UserReviewDB& db, const std::string& path,
                  const json& header) {
  std::string content = header.dump() + "\n";
  for (const auto& [user_id, reviews] : db.users) {
    json j;
    j["kind"] = "user";
    j["user_id"] = user_id;
    json list = json::array();
    for (const Review& r : reviews) {
      json rj;
      rj["item_id"] = r.item_id;
      rj["title"] = r.title;
      rj["rating"] = r.rating;
      rj["text"] = r.text;
      rj["votes"] = r.votes;
      if (r.abstract) rj["abstract"] = abstract_to_json(*r.abstract);
      list.push_back(std::move(rj));
    }
    j["reviews"] = std::move(list);
    content += j.dump() + "\n";
  }
  write_file_atomic(path, content);
}

UserReviewDB load_user_db(const std::string& path) {
  UserReviewDB db;
  for (const json& j : read_jsonl(path)) {
    std::string user_id = j.at("user_id").get<std::string>();
    std::vector<Review> reviews;
    for (const json& rj : j.at("reviews")) {
      Review r;
      r.user_id = user_id;
      r.item_id = rj.at("item_id").get<std::string>();
      r.title = rj.at("title").get<std::string>();
      r.rating = rj.at("rating").get<int>();
      r.text = rj.at("text").get<std::string>();
      r.votes = rj.at("votes").get<std::int64_t>();
      if (rj.contains("abstract")) {
        r.abstract = abstract_from_json(rj.at("abstract"));
      }
      reviews.push_back(std::move(r));
    }
    db.users[user_id] = std::move(reviews);
  }
  return db;
}

void save_item_db(const ItemReviewDB& db, const std::string& path,
                  const json& header) {
  std::string content = header.dump() + "\n";
  for (const auto& [item_id, entry] : db.items) {
    json j;
    j["kind"] = "item";
    j["item_id"] = item_id;
    j["title"] = entry.record.title;
    j["genre"] = entry.record.genre;
    j["director"] = entry.record.director;
    j["cast"] = entry.record.cast;
    json selected = json::array();
    for (const Review& r : entry.selected) {
      json rj;
      rj["user_id"] = r.user_id;
      rj["item_id"] = r.item_id;
      rj["title"] = r.title;
      rj["rating"] = r.rating;
      rj["text"] = r.text;
      rj["votes"] = r.votes;
      selected.push_back(std::move(rj));
    }
    j["selected_reviews"] = std::move(selected);
    if (entry.knowledge) j["knowledge"] = abstract_to_json(*entry.knowledge);
    content += j.dump() + "\n";
  }
  write_file_atomic(path, content);
}

ItemReviewDB load_item_db(const std::string& path) {
  ItemReviewDB db;
  for (const json& j : read_jsonl(path)) {
    ItemEntry entry;
    entry.record.item_id = j.at("item_id").get<std::string>();
    entry.record.title = j.at("title").get<std::string>();
    entry.record.genre = j.at("genre").get<std::vector<std::string>>();
    entry.record.director = j.at("director").get<std::vector<std::string>>();
    entry.record.cast = j.at("cast").get<std::vector<std::string>>();
    for (const json& rj : j.at("selected_reviews")) {
      Review r;
      r.user_id = rj.at("user_id").get<std::string>();
      r.item_id = rj.at("item_id").get<std::string>();
      r.title = rj.at("title").get<std::string>();
      r.rating = rj.at("rating").get<int>();
      r.text = rj.at("text").get<std::string>();
      r.votes = rj.at("votes").get<std::int64_t>();
      entry.selected.push_back(std::move(r));
    }
    if (j.contains("knowledge")) {
      entry.knowledge = abstract_from_json(j.at("knowledge"));
    }
    db.items[entry.record.item_id] = std::move(entry);
  }
  return db;
}

}  // namespace convrec::io
