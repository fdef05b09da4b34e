#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "convrec/gateway.hpp"
#include "convrec/prompts.hpp"

namespace convrec {

struct Candidate {
  std::string item_id;
  std::string title;
  std::string knowledge;
  double score = 0.0;
};

struct CandidateSet {
  std::vector<Candidate> items;  // scores non-increasing; forced target last
  int k = 0;
  bool target_forced = false;
};

// An item eligible for retrieval: something this user has reviewed, with
// its rendered knowledge text.
struct PoolItem {
  std::string item_id;
  std::string title;
  std::string knowledge;
};

// Read-mostly memo of knowledge-text embeddings, shared across sessions.
class EmbeddingCache {
 public:
  EmbeddingVector get_or_compute(
      const std::string& key,
      const std::function<EmbeddingVector()>& compute);

 private:
  std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

// Ranks the pool by cosine similarity between the transcript embedding and
// each item's knowledge embedding (ties by item_id ascending). From
// force_from_turn on, a target missing from the top k replaces the
// lowest-ranked candidate and is appended last.
CandidateSet retrieve_candidates(Gateway& gateway, EmbeddingCache& cache,
                                 const std::vector<TurnText>& context,
                                 const std::vector<PoolItem>& pool, int k,
                                 int turn_index, const std::string& target_id,
                                 int force_from_turn);

struct Reasoning {
  std::string think;
  std::optional<std::string> movie_line;
  std::string utterance;
};

// Line-anchored scan for "Think:", optional "Movie:", required
// "Recommender:"; each field runs to the next prefix line. Throws
// ParseError when Think or Recommender is missing or empty.
Reasoning parse_reasoning(const std::string& raw);

enum class RecPhase { kQuestioning, kRecommending };

struct RecTurn {
  std::string think;
  std::optional<std::string> movie_id;
  std::optional<std::string> movie_line;
  std::string text;
};

class RecommenderSim {
 public:
  RecommenderSim(Gateway& gateway, PromptTemplates templates,
                 double temperature, int max_tokens)
      : gateway_(gateway),
        templates_(std::move(templates)),
        temperature_(temperature),
        max_tokens_(max_tokens) {}

  // Renders the candidate knowledge and context into the recommender
  // prompt, parses the Think/Movie/Recommender reply (re-asking up to twice
  // on malformed output), and resolves the movie line against the
  // candidates. A title outside the candidate set raises OffCandidateError.
  RecTurn next_utterance(const std::vector<TurnText>& context,
                         const CandidateSet& candidates, RecPhase phase,
                         std::optional<std::uint64_t> seed);

 private:
  Gateway& gateway_;
  PromptTemplates templates_;
  double temperature_;
  int max_tokens_;
};

}  // namespace convrec
