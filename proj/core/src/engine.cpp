#include "convrec/engine.hpp"

#include <condition_variable>
#include <mutex>

#include "convrec/text.hpp"

namespace convrec {

std::string Outcome::label() const {
  switch (kind) {
    case OutcomeKind::kAcceptedTarget:
      return "accepted-target";
    case OutcomeKind::kMaxTurns:
      return "max-turns";
    case OutcomeKind::kAborted:
      return reason.empty() ? "aborted" : "aborted:" + reason;
  }
  return "unknown";
}

void SessionConfig::validate() const {
  if (max_utterances < 8 || max_utterances % 2 != 0) {
    throw ConfigError("session.max_utterances must be even and >= 8");
  }
  if (force_from_turn < 3) {
    throw ConfigError("session.force_from_turn must be >= 3");
  }
  if (k_schedule.empty()) {
    throw ConfigError("session.k_schedule must not be empty");
  }
  for (int k : k_schedule) {
    if (k < 1) throw ConfigError("session.k_schedule entries must be >= 1");
  }
}

namespace {

std::vector<TurnText> as_turn_texts(const std::vector<DialogueTurn>& turns) {
  std::vector<TurnText> out;
  out.reserve(turns.size());
  for (const DialogueTurn& t : turns) out.push_back({t.seeker, t.text});
  return out;
}

// The user's reviewed items that carry item knowledge, minus anything
// already recommended.
std::vector<PoolItem> build_pool(const UserReviewDB& user_db,
                                 const ItemReviewDB& item_db,
                                 const std::string& user_id,
                                 const std::set<std::string>& excluded) {
  std::vector<PoolItem> pool;
  for (const Review& r : user_db.reviews_for(user_id)) {
    if (excluded.count(r.item_id)) continue;
    auto it = item_db.items.find(r.item_id);
    if (it == item_db.items.end() || !it->second.knowledge.has_value()) continue;
    pool.push_back({r.item_id, it->second.record.title,
                    render_item_knowledge(it->second.record,
                                          *it->second.knowledge)});
  }
  return pool;
}

CandidateAudit audit_of(const CandidateSet& set) {
  CandidateAudit audit;
  audit.k = set.k;
  audit.target_forced = set.target_forced;
  for (const Candidate& c : set.items) audit.ranked.push_back({c.item_id, c.score});
  return audit;
}

}  // namespace

std::string dialogue_id_for(const std::string& user_id, int replica) {
  return user_id + "#" + std::to_string(replica);
}

Dialogue generate_dialogue(const Persona& persona, const UserReviewDB& user_db,
                           const ItemReviewDB& item_db, EngineDeps& deps,
                           const SessionConfig& config, std::uint64_t seed,
                           std::string dialogue_id) {
  config.validate();

  Dialogue dialogue;
  dialogue.dialogue_id = std::move(dialogue_id);
  dialogue.user_id = persona.user_id;
  dialogue.target_item_id = persona.target_item_id;
  dialogue.persona = persona;
  dialogue.seed = seed;
  dialogue.chat_backend = deps.gateway.chat_tag();
  dialogue.embedding_backend = deps.gateway.embedding_tag();

  auto target_entry = item_db.items.find(persona.target_item_id);
  if (target_entry == item_db.items.end() ||
      !target_entry->second.knowledge.has_value()) {
    dialogue.outcome = {OutcomeKind::kAborted, "target-missing-knowledge"};
    return dialogue;
  }

  auto& turns = dialogue.turns;
  turns.push_back({true, deps.templates.seed_seeker, false, {}, {}, {}, {}, {}});
  turns.push_back({false, deps.templates.seed_recommender, false, {}, {}, {}, {}, {}});

  std::set<std::string> recommended;
  std::optional<LastRecommendation> pending_rec;
  int rec_turn_index = 0;  // generated recommender turns, 1-based below

  const std::size_t cap = static_cast<std::size_t>(config.max_utterances);
  try {
    while (true) {
      // Seeker turn.
      std::optional<Abstract> responsive;
      if (pending_rec && pending_rec->item_id != persona.target_item_id) {
        responsive = responsive_preference(user_db, persona.user_id,
                                           pending_rec->item_id);
      }
      SeekerTurn st = deps.seeker.next_utterance(
          persona, as_turn_texts(turns), pending_rec, responsive, seed);
      DialogueTurn turn;
      turn.seeker = true;
      turn.text = st.text;
      turn.terminal = st.is_terminal;
      turn.accepted_item_id = st.accepted_item_id;
      turns.push_back(std::move(turn));

      if (st.is_terminal) {
        if (st.accepted_item_id == persona.target_item_id) {
          dialogue.outcome = {OutcomeKind::kAcceptedTarget, ""};
        } else {
          dialogue.outcome = {OutcomeKind::kAborted, "wrong-acceptance"};
        }
        return dialogue;
      }
      if (turns.size() >= cap) {
        dialogue.outcome = {OutcomeKind::kMaxTurns, ""};
        return dialogue;
      }

      // Recommender turn.
      ++rec_turn_index;
      RecPhase phase = rec_turn_index == 1 ? RecPhase::kQuestioning
                                           : RecPhase::kRecommending;
      std::vector<PoolItem> pool =
          build_pool(user_db, item_db, persona.user_id, recommended);
      if (pool.empty()) {
        dialogue.outcome = {OutcomeKind::kAborted, "pool-exhausted"};
        return dialogue;
      }
      const auto& schedule = config.k_schedule;
      int k = schedule[std::min<std::size_t>(
          static_cast<std::size_t>(rec_turn_index - 1), schedule.size() - 1)];
      CandidateSet candidates = retrieve_candidates(
          deps.gateway, deps.embedding_cache, as_turn_texts(turns), pool, k,
          rec_turn_index, persona.target_item_id, config.force_from_turn);

      RecTurn rt = deps.recommender.next_utterance(as_turn_texts(turns),
                                                   candidates, phase, seed);
      DialogueTurn turn2;
      turn2.seeker = false;
      turn2.text = rt.text;
      turn2.think = rt.think;
      turn2.movie_id = rt.movie_id;
      turn2.movie_line = rt.movie_line;
      turn2.candidates = audit_of(candidates);
      turns.push_back(std::move(turn2));

      if (rt.movie_id) {
        recommended.insert(*rt.movie_id);
        std::string title;
        auto it = item_db.items.find(*rt.movie_id);
        if (it != item_db.items.end()) title = it->second.record.title;
        pending_rec = LastRecommendation{*rt.movie_id, title};
      } else {
        pending_rec.reset();
      }

      if (turns.size() >= cap) {
        dialogue.outcome = {OutcomeKind::kMaxTurns, ""};
        return dialogue;
      }
    }
  } catch (const OffCandidateError&) {
    dialogue.outcome = {OutcomeKind::kAborted, "off-candidate"};
  } catch (const EmptyCompletionError&) {
    dialogue.outcome = {OutcomeKind::kAborted, "empty-completion"};
  } catch (const SimulatorError& e) {
    dialogue.outcome = {OutcomeKind::kAborted,
                        std::string("simulator:") + e.what()};
  }
  return dialogue;
}

RunReport run_batch(const std::vector<std::string>& user_ids, int per_user,
                    const UserReviewDB& user_db, const ItemReviewDB& item_db,
                    EngineDeps& deps, const SessionConfig& config,
                    std::uint64_t base_seed, const BatchOptions& options,
                    const std::set<std::string>& completed,
                    const DialogueSink& sink) {
  config.validate();
  if (per_user < 1) throw ConfigError("per-user dialogue count must be >= 1");

  struct Job {
    std::string user_id;
    int replica;
    std::string dialogue_id;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  RunReport report;
  for (std::size_t u = 0; u < user_ids.size(); ++u) {
    for (int r = 0; r < per_user; ++r) {
      std::uint64_t ordinal = u * static_cast<std::uint64_t>(per_user) +
                              static_cast<std::uint64_t>(r);
      std::string id = dialogue_id_for(user_ids[u], r);
      ++report.sessions_planned;
      if (completed.count(id)) {
        ++report.sessions_resumed;
        continue;
      }
      jobs.push_back({user_ids[u], r, std::move(id), base_seed + ordinal});
    }
  }
  if (options.stop_after > 0 && jobs.size() > options.stop_after) {
    jobs.resize(options.stop_after);
  }

  struct Slot {
    bool done = false;
    bool emitted = false;
    std::optional<Dialogue> dialogue;  // empty for ineligible users
    bool ineligible = false;
    bool transport_failed = false;
  };
  std::vector<Slot> slots(jobs.size());
  std::mutex emit_mu;
  std::size_t next_emit = 0;

  auto run_session = [&](std::size_t i) -> Slot {
    Slot slot;
    const Job& job = jobs[i];
    Persona persona;
    try {
      persona = build_persona(user_db, job.user_id, job.seed);
    } catch (const IneligibleUserError&) {
      slot.ineligible = true;
      return slot;
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        slot.dialogue = generate_dialogue(persona, user_db, item_db, deps,
                                          config, job.seed, job.dialogue_id);
        return slot;
      } catch (const TransportError&) {
        if (attempt == 1) {
          slot.transport_failed = true;
          Dialogue failed;
          failed.dialogue_id = job.dialogue_id;
          failed.user_id = job.user_id;
          failed.target_item_id = persona.target_item_id;
          failed.persona = persona;
          failed.seed = job.seed;
          failed.chat_backend = deps.gateway.chat_tag();
          failed.embedding_backend = deps.gateway.embedding_tag();
          failed.outcome = {OutcomeKind::kAborted, "transport"};
          slot.dialogue = std::move(failed);
        }
      }
    }
    return slot;
  };

  parallel_for(jobs.size(), options.parallelism, [&](std::size_t i) {
    Slot slot = run_session(i);
    std::lock_guard<std::mutex> lock(emit_mu);
    slots[i] = std::move(slot);
    slots[i].done = true;
    // Flush the contiguous completed prefix so output order is stable
    // across parallelism levels.
    while (next_emit < slots.size() && slots[next_emit].done) {
      Slot& s = slots[next_emit];
      if (!s.emitted) {
        s.emitted = true;
        if (s.ineligible) {
          ++report.users_ineligible;
        } else if (s.dialogue) {
          if (s.transport_failed) ++report.transport_failures;
          ++report.dialogues_emitted;
          ++report.outcomes[s.dialogue->outcome.label()];
          sink(*s.dialogue);
        }
      }
      ++next_emit;
    }
  });

  report.usage = deps.gateway.usage();
  return report;
}

}  // namespace convrec
