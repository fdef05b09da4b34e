#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "convrec/corpus.hpp"
#include "convrec/persona.hpp"
#include "convrec/recommender.hpp"
#include "convrec/seeker.hpp"

namespace convrec {

struct CandidateAudit {
  struct Entry {
    std::string item_id;
    double score = 0.0;
  };
  std::vector<Entry> ranked;
  int k = 0;
  bool target_forced = false;
};

struct DialogueTurn {
  bool seeker = false;
  std::string text;
  // seeker turns
  bool terminal = false;
  std::optional<std::string> accepted_item_id;
  // recommender turns
  std::string think;
  std::optional<std::string> movie_id;
  std::optional<std::string> movie_line;
  std::optional<CandidateAudit> candidates;
};

enum class OutcomeKind { kAcceptedTarget, kAborted, kMaxTurns };

struct Outcome {
  OutcomeKind kind = OutcomeKind::kAborted;
  std::string reason;  // set for aborts

  std::string label() const;
};

struct Dialogue {
  std::string dialogue_id;
  std::string user_id;
  std::string target_item_id;
  Persona persona;
  std::vector<DialogueTurn> turns;  // strictly alternating, seeker first
  Outcome outcome;
  std::uint64_t seed = 0;
  std::string chat_backend;
  std::string embedding_backend;
};

struct SessionConfig {
  std::vector<int> k_schedule = {3};  // per recommender turn, last repeats
  int force_from_turn = 3;            // 1-based generated recommender turn
  int max_utterances = 20;
  double simulator_temperature = 0.8;
  int max_tokens = 512;

  // Throws ConfigError: max_utterances must be even and >= 8,
  // force_from_turn >= 3, every k >= 1.
  void validate() const;
};

struct EngineDeps {
  Gateway& gateway;
  EmbeddingCache& embedding_cache;
  SeekerSim& seeker;
  RecommenderSim& recommender;
  PromptTemplates templates;
};

// Runs one session to completion. Simulator and parse failures abort the
// dialogue (outcome carries the reason) without throwing; TransportError
// propagates so the batch layer can retry the session once.
Dialogue generate_dialogue(const Persona& persona, const UserReviewDB& user_db,
                           const ItemReviewDB& item_db, EngineDeps& deps,
                           const SessionConfig& config, std::uint64_t seed,
                           std::string dialogue_id);

std::string dialogue_id_for(const std::string& user_id, int replica);

struct RunReport {
  std::size_t sessions_planned = 0;
  std::size_t sessions_resumed = 0;  // skipped, already in the output
  std::size_t dialogues_emitted = 0;
  std::size_t users_ineligible = 0;
  std::size_t transport_failures = 0;
  std::map<std::string, std::size_t> outcomes;  // label -> count
  GatewayUsage usage;
};

struct BatchOptions {
  int parallelism = 1;
  // Test/interrupt hook: stop scheduling new sessions once this many have
  // been emitted in this run. 0 means no limit.
  std::size_t stop_after = 0;
};

using DialogueSink = std::function<void(const Dialogue&)>;

// Deterministic work assignment: session ordinal o = user_index * per_user
// + replica, seed = base_seed + o, dialogue_id = "<user>#<replica>".
// Dialogues reach the sink in ordinal order regardless of parallelism;
// ids present in `completed` are skipped so interrupted runs resume
// without duplicates.
RunReport run_batch(const std::vector<std::string>& user_ids, int per_user,
                    const UserReviewDB& user_db, const ItemReviewDB& item_db,
                    EngineDeps& deps, const SessionConfig& config,
                    std::uint64_t base_seed, const BatchOptions& options,
                    const std::set<std::string>& completed,
                    const DialogueSink& sink);

}  // namespace convrec
