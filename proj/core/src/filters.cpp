#include "convrec/filters.hpp"

#include <mutex>

#include "convrec/text.hpp"

namespace convrec {

void FilterConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("filter.delta must be in (0, 1)");
  }
  if (!(repetition_jaccard > 0.0 && repetition_jaccard <= 1.0)) {
    throw ConfigError("filter.repetition_jaccard must be in (0, 1]");
  }
  if (repetition_n < 1) throw ConfigError("filter.repetition_n must be >= 1");
}

RuleResult filter_repetition(const Dialogue& dialogue,
                             const FilterConfig& config) {
  RuleResult result;
  const auto& turns = dialogue.turns;
  std::vector<std::vector<std::string>> tokens(turns.size());
  for (std::size_t i = 0; i < turns.size(); ++i) {
    tokens[i] = text::tokenize(turns[i].text);
  }
  for (std::size_t j = 1; j < turns.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      bool duplicate = turns[i].text == turns[j].text;
      bool similar = false;
      if (!duplicate && turns[i].seeker == turns[j].seeker) {
        similar = text::ngram_jaccard(tokens[i], tokens[j],
                                      config.repetition_n) >
                  config.repetition_jaccard;
      }
      if (duplicate || similar) {
        result.failed = true;
        result.evidence.push_back(
            {static_cast<int>(i), static_cast<int>(j),
             duplicate ? "exact duplicate" : "near duplicate",
             duplicate ? 1.0
                       : text::ngram_jaccard(tokens[i], tokens[j],
                                             config.repetition_n)});
      }
    }
  }
  return result;
}

RuleResult filter_target_leak(const Dialogue& dialogue) {
  RuleResult result;
  const std::string target_norm =
      text::normalize_title(dialogue.persona.target_title);
  if (target_norm.empty()) return result;

  // Utterances before the first recommendation of the target count; when
  // the target is never recommended, everything counts.
  std::size_t first_target_rec = dialogue.turns.size();
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const DialogueTurn& t = dialogue.turns[i];
    if (!t.seeker && t.movie_id && *t.movie_id == dialogue.target_item_id) {
      first_target_rec = i;
      break;
    }
  }
  for (std::size_t i = 0; i < first_target_rec; ++i) {
    const DialogueTurn& t = dialogue.turns[i];
    if (!t.seeker) continue;
    std::string normalized = text::normalize_for_match(t.text);
    if (normalized.find(target_norm) != std::string::npos) {
      result.failed = true;
      result.evidence.push_back(
          {static_cast<int>(i), -1, "target title in seeker utterance", 0.0});
    }
  }
  return result;
}

RuleResult filter_wrong_acceptance(const Dialogue& dialogue) {
  RuleResult result;
  std::optional<std::string> last_movie;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const DialogueTurn& t = dialogue.turns[i];
    if (!t.seeker) {
      if (t.movie_id) last_movie = t.movie_id;
      continue;
    }
    if (!t.terminal) continue;
    bool accepted_other =
        t.accepted_item_id && *t.accepted_item_id != dialogue.target_item_id;
    bool last_not_target = !last_movie || *last_movie != dialogue.target_item_id;
    if (accepted_other || last_not_target) {
      result.failed = true;
      result.evidence.push_back(
          {static_cast<int>(i), -1,
           t.accepted_item_id ? "accepted '" + *t.accepted_item_id + "'"
                              : "terminal without accepted item",
           0.0});
    }
  }
  return result;
}

std::vector<std::string> persona_statements(const Persona& persona) {
  std::vector<std::string> statements;
  auto add = [&](const Abstract& abstract) {
    if (abstract.like) statements.push_back("likes: " + *abstract.like);
    if (abstract.dislike) statements.push_back("dislikes: " + *abstract.dislike);
  };
  for (const PersonaReview& r : persona.general) add(r.abstract);
  add(persona.target_abstract);
  return statements;
}

namespace {

double contradiction_score(const NliFn& nli, const std::string& premise,
                           const std::string& hypothesis, bool swapped) {
  NliScores scores =
      swapped ? nli(hypothesis, premise) : nli(premise, hypothesis);
  return scores.contradict;
}

}  // namespace

RuleResult filter_persona_contradiction(const Dialogue& dialogue,
                                        const Persona& persona,
                                        const NliFn& nli,
                                        const FilterConfig& config) {
  RuleResult result;
  const std::vector<std::string> statements = persona_statements(persona);
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const DialogueTurn& t = dialogue.turns[i];
    if (!t.seeker || t.text.empty()) continue;
    for (const std::string& statement : statements) {
      double score = contradiction_score(nli, statement, t.text,
                                         config.swap_nli_orientation);
      if (score > config.delta) {
        result.failed = true;
        result.evidence.push_back({static_cast<int>(i), -1, statement, score});
      }
    }
  }
  return result;
}

RuleResult filter_guess_contradiction(const Dialogue& dialogue,
                                      const NliFn& nli,
                                      const FilterConfig& config) {
  RuleResult result;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const DialogueTurn& rec = dialogue.turns[i];
    if (rec.seeker || rec.think.empty()) continue;
    for (std::size_t j = 0; j < i; ++j) {
      const DialogueTurn& utt = dialogue.turns[j];
      if (!utt.seeker || utt.text.empty()) continue;
      double score = contradiction_score(nli, utt.text, rec.think,
                                         config.swap_nli_orientation);
      if (score > config.delta) {
        result.failed = true;
        result.evidence.push_back(
            {static_cast<int>(i), static_cast<int>(j), rec.think, score});
      }
    }
  }
  return result;
}

FilterVerdict evaluate_dialogue(const Dialogue& dialogue, const NliFn& nli,
                                const FilterConfig& config) {
  config.validate();
  FilterVerdict verdict;
  verdict.dialogue_id = dialogue.dialogue_id;

  auto record = [&](const char* rule, RuleResult result) {
    if (result.failed) {
      verdict.passed = false;
      verdict.failed_rules.push_back(rule);
      verdict.evidence[rule] = std::move(result.evidence);
    }
  };

  record(kRuleRepetition, filter_repetition(dialogue, config));
  record(kRuleTargetLeak, filter_target_leak(dialogue));
  record(kRuleWrongAcceptance, filter_wrong_acceptance(dialogue));
  record(kRulePersonaContradiction,
         filter_persona_contradiction(dialogue, dialogue.persona, nli, config));
  record(kRuleGuessContradiction,
         filter_guess_contradiction(dialogue, nli, config));
  return verdict;
}

FilterOutcome apply_filters(const std::vector<Dialogue>& dialogues,
                            const NliFn& nli, const FilterConfig& config,
                            int parallelism) {
  config.validate();
  FilterOutcome outcome;
  outcome.report.total = dialogues.size();

  std::vector<std::optional<FilterVerdict>> verdicts(dialogues.size());
  std::vector<bool> held(dialogues.size(), false);
  std::mutex mu;

  parallel_for(dialogues.size(), parallelism, [&](std::size_t i) {
    try {
      FilterVerdict v = evaluate_dialogue(dialogues[i], nli, config);
      std::lock_guard<std::mutex> lock(mu);
      verdicts[i] = std::move(v);
    } catch (const TransportError&) {
      std::lock_guard<std::mutex> lock(mu);
      held[i] = true;
    }
  });

  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    if (held[i]) {
      outcome.held_ids.push_back(dialogues[i].dialogue_id);
      ++outcome.report.held;
      continue;
    }
    FilterVerdict& v = *verdicts[i];
    if (v.passed) {
      ++outcome.report.kept;
    } else {
      ++outcome.report.removed;
      for (const std::string& rule : v.failed_rules) {
        ++outcome.report.failures_by_rule[rule];
      }
    }
    outcome.verdicts.push_back(std::move(v));
  }
  const std::size_t evaluated = outcome.report.total - outcome.report.held;
  outcome.report.removal_rate =
      evaluated == 0 ? 0.0
                     : static_cast<double>(outcome.report.removed) /
                           static_cast<double>(evaluated);
  return outcome;
}

}  // namespace convrec
