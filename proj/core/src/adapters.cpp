#include "convrec/adapters.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

#include "convrec/io.hpp"
#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

namespace {

using nlohmann::json;

bool role_is_seeker(const std::string& role) {
  std::string r = text::to_lower(role);
  if (r == "seeker" || r == "user") return true;
  if (r == "recommender" || r == "assistant" || r == "system") return false;
  throw ParseError("unknown role '" + role + "'");
}

std::vector<TranscriptDialogue> load_native(const std::string& path) {
  std::vector<TranscriptDialogue> out;
  for (const json& j : io::read_jsonl(path)) {
    if (j.value("kind", "") != "dialogue") continue;
    TranscriptDialogue d;
    d.id = j.at("dialogue_id").get<std::string>();
    for (const json& tj : j.at("turns")) {
      d.turns.push_back({tj.at("role").get<std::string>() == "seeker",
                         tj.at("text").get<std::string>()});
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<TranscriptDialogue> load_transcript(const std::string& path) {
  // One turn per line; dialogue order follows first appearance.
  std::vector<TranscriptDialogue> out;
  std::map<std::string, std::size_t> index;
  for (const json& j : io::read_jsonl(path)) {
    std::string id = j.at("dialogue_id").get<std::string>();
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) out.push_back({id, {}});
    out[it->second].turns.push_back(
        {role_is_seeker(j.at("role").get<std::string>()),
         j.at("text").get<std::string>()});
  }
  return out;
}

std::vector<TranscriptDialogue> load_redial(const std::string& path) {
  std::vector<TranscriptDialogue> out;
  for (const json& j : io::read_jsonl(path)) {
    TranscriptDialogue d;
    if (j.contains("conversationId")) {
      const json& id = j.at("conversationId");
      d.id = id.is_string() ? id.get<std::string>()
                            : std::to_string(id.get<std::int64_t>());
    } else {
      d.id = "redial-" + std::to_string(out.size());
    }
    const std::int64_t initiator = j.at("initiatorWorkerId").get<std::int64_t>();
    for (const json& m : j.at("messages")) {
      d.turns.push_back(
          {m.at("senderWorkerId").get<std::int64_t>() == initiator,
           m.at("text").get<std::string>()});
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<TranscriptDialogue> load_inspired(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open input file '" + path + "'");
  std::vector<TranscriptDialogue> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected dialog_id<TAB>speaker<TAB>text");
    }
    std::string id = line.substr(0, tab1);
    std::string speaker = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string utterance = line.substr(tab2 + 1);
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) out.push_back({id, {}});
    out[it->second].turns.push_back({role_is_seeker(speaker), utterance});
  }
  return out;
}

}  // namespace

CorpusFormat corpus_format_from_string(const std::string& name) {
  std::string n = text::to_lower(name);
  if (n == "native") return CorpusFormat::kNative;
  if (n == "transcript") return CorpusFormat::kTranscript;
  if (n == "redial") return CorpusFormat::kRedial;
  if (n == "inspired") return CorpusFormat::kInspired;
  throw ConfigError("unknown corpus format '" + name + "'");
}

std::vector<TranscriptDialogue> load_corpus(const std::string& path,
                                            CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kNative:
      return load_native(path);
    case CorpusFormat::kTranscript:
      return load_transcript(path);
    case CorpusFormat::kRedial:
      return load_redial(path);
    case CorpusFormat::kInspired:
      return load_inspired(path);
  }
  throw ConfigError("unhandled corpus format");
}

std::vector<RankedEpisode> load_episodes(const std::string& path) {
  std::vector<RankedEpisode> out;
  for (const json& j : io::read_jsonl(path)) {
    RankedEpisode e;
    e.target = j.at("target").get<std::string>();
    e.ranking = j.at("ranking").get<std::vector<std::string>>();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace convrec
