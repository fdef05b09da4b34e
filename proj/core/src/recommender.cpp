#include "convrec/recommender.hpp"

#include <algorithm>

#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

EmbeddingVector EmbeddingCache::get_or_compute(
    const std::string& key, const std::function<EmbeddingVector()>& compute) {
  // Single-flight: the lock is held across compute so each key is embedded
  // exactly once and request counts stay deterministic under parallelism.
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  auto [inserted_it, inserted] = entries_.emplace(key, compute());
  return inserted_it->second;
}

CandidateSet retrieve_candidates(Gateway& gateway, EmbeddingCache& cache,
                                 const std::vector<TurnText>& context,
                                 const std::vector<PoolItem>& pool, int k,
                                 int turn_index, const std::string& target_id,
                                 int force_from_turn) {
  if (pool.empty()) throw PreconditionError("candidate pool is empty");
  if (k < 1) throw PreconditionError("k must be >= 1");

  EmbeddingVector context_vec = gateway.embed(render_dialogue_context(context));

  struct Scored {
    const PoolItem* item;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (const PoolItem& item : pool) {
    EmbeddingVector vec = cache.get_or_compute(
        item.item_id, [&] { return gateway.embed(item.knowledge); });
    scored.push_back({&item, cosine_similarity(context_vec, vec)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item->item_id < b.item->item_id;
  });

  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                 scored.size());
  CandidateSet set;
  set.k = k;
  for (std::size_t i = 0; i < take; ++i) {
    set.items.push_back({scored[i].item->item_id, scored[i].item->title,
                         scored[i].item->knowledge, scored[i].score});
  }

  if (turn_index >= force_from_turn) {
    bool target_present = std::any_of(
        set.items.begin(), set.items.end(),
        [&](const Candidate& c) { return c.item_id == target_id; });
    if (!target_present) {
      auto target_it = std::find_if(
          scored.begin(), scored.end(),
          [&](const Scored& s) { return s.item->item_id == target_id; });
      if (target_it != scored.end()) {
        set.items.pop_back();
        set.items.push_back({target_it->item->item_id, target_it->item->title,
                             target_it->item->knowledge, target_it->score});
        set.target_forced = true;
      }
    }
  }
  return set;
}

Reasoning parse_reasoning(const std::string& raw) {
  struct Field {
    const char* prefix;
    std::string value;
    bool present = false;
  };
  Field think{"Think:", {}, false};
  Field movie{"Movie:", {}, false};
  Field recommender{"Recommender:", {}, false};
  Field* fields[] = {&think, &movie, &recommender};

  Field* current = nullptr;
  for (const std::string& raw_line : text::split_lines(raw)) {
    std::string line = text::trim(raw_line);
    Field* started = nullptr;
    for (Field* f : fields) {
      if (line.starts_with(f->prefix) && !f->present) {
        started = f;
        break;
      }
    }
    if (started) {
      started->present = true;
      started->value = text::trim(line.substr(std::string(started->prefix).size()));
      current = started;
    } else if (current) {
      if (!current->value.empty()) current->value += "\n";
      current->value += raw_line;
    }
  }

  if (!think.present || text::trim(think.value).empty()) {
    throw ParseError("completion lacks a Think field");
  }
  if (!recommender.present || text::trim(recommender.value).empty()) {
    throw ParseError("completion lacks a Recommender field");
  }

  Reasoning reasoning;
  reasoning.think = text::trim(think.value);
  reasoning.utterance = text::trim(recommender.value);
  if (movie.present && !text::trim(movie.value).empty()) {
    reasoning.movie_line = text::trim(movie.value);
  }
  return reasoning;
}

namespace {

// Matches a "Movie:" line against the candidates, case-insensitively and
// tolerating a missing/extra year suffix.
const Candidate* resolve_movie(const std::string& movie_line,
                               const CandidateSet& candidates) {
  const std::string needle = text::normalize_title(movie_line);
  for (const Candidate& c : candidates.items) {
    if (text::normalize_title(c.title) == needle) return &c;
  }
  return nullptr;
}

constexpr int kMaxAsks = 3;  // first ask + two re-asks

const char* kFormatReminder =
    "\n\nRemember to reply in the exact format with 'Think:' and "
    "'Recommender:' lines (and a 'Movie:' line when you suggest one).";

}  // namespace

RecTurn RecommenderSim::next_utterance(const std::vector<TurnText>& context,
                                       const CandidateSet& candidates,
                                       RecPhase phase,
                                       std::optional<std::uint64_t> seed) {
  if (phase == RecPhase::kRecommending && candidates.items.empty()) {
    throw PreconditionError("recommending phase requires candidates");
  }

  std::vector<std::string> blocks;
  blocks.reserve(candidates.items.size());
  for (const Candidate& c : candidates.items) blocks.push_back(c.knowledge);

  ChatRequest request;
  request.system_prompt = templates_.recommender.system_part;
  request.user_prompt = fill_template(
      templates_.recommender.user_part,
      {{"k_movies_info", text::join(blocks, "\n\n")},
       {"dialogue_context", render_dialogue_context(context)}});
  request.temperature = temperature_;
  request.max_tokens = max_tokens_;
  request.seed = seed;

  std::string last_error;
  for (int ask = 0; ask < kMaxAsks; ++ask) {
    ChatRequest attempt = request;
    if (ask > 0) attempt.user_prompt += kFormatReminder;
    std::string completion = gateway_.chat(attempt);

    // The prompt ends with the "Think:" anchor, so a bare continuation is
    // the think text itself.
    bool has_think = false;
    for (const std::string& line : text::split_lines(completion)) {
      if (text::trim(line).starts_with("Think:")) {
        has_think = true;
        break;
      }
    }
    if (!has_think) completion = "Think: " + completion;

    Reasoning reasoning;
    try {
      reasoning = parse_reasoning(completion);
    } catch (const ParseError& e) {
      last_error = e.what();
      continue;
    }

    if (phase == RecPhase::kQuestioning && reasoning.movie_line) {
      last_error = "movie suggested during the questioning phase";
      continue;
    }

    RecTurn turn;
    turn.think = reasoning.think;
    turn.text = reasoning.utterance;
    if (reasoning.movie_line) {
      const Candidate* match = resolve_movie(*reasoning.movie_line, candidates);
      if (!match) {
        throw OffCandidateError("recommended title '" + *reasoning.movie_line +
                                "' is not among the candidates");
      }
      turn.movie_id = match->item_id;
      turn.movie_line = reasoning.movie_line;
    }
    return turn;
  }
  throw SimulatorError("recommender output unusable after " +
                       std::to_string(kMaxAsks) + " asks: " + last_error);
}

}  // namespace convrec
