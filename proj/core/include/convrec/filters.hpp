#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convrec/engine.hpp"
#include "convrec/gateway.hpp"

namespace convrec {

struct FilterConfig {
  double delta = 0.7;             // strict '>' on the contradiction score
  double repetition_jaccard = 0.8;
  int repetition_n = 3;
  // Default pairing: persona statement (or seeker utterance, for the guess
  // rule) as premise, the checked text as hypothesis. Flipping swaps every
  // pair.
  bool swap_nli_orientation = false;

  void validate() const;
};

inline constexpr const char* kRuleRepetition = "repetition";
inline constexpr const char* kRuleTargetLeak = "target-leak";
inline constexpr const char* kRuleWrongAcceptance = "wrong-acceptance";
inline constexpr const char* kRulePersonaContradiction = "persona-contradiction";
inline constexpr const char* kRuleGuessContradiction = "guess-contradiction";

struct RuleEvidence {
  int turn_a = -1;
  int turn_b = -1;        // second locator where a pair is involved
  std::string detail;     // e.g. the persona statement involved
  double score = 0.0;
};

struct RuleResult {
  bool failed = false;
  std::vector<RuleEvidence> evidence;
};

struct FilterVerdict {
  std::string dialogue_id;
  bool passed = true;
  std::vector<std::string> failed_rules;
  std::map<std::string, std::vector<RuleEvidence>> evidence;
};

using NliFn =
    std::function<NliScores(const std::string&, const std::string&)>;

// Fails when two same-role utterances exceed the word-n-gram Jaccard
// threshold or any utterance exactly duplicates an earlier one.
RuleResult filter_repetition(const Dialogue& dialogue, const FilterConfig& config);

// Fails when the normalized target title occurs in a seeker utterance
// before the recommender first recommends the target.
RuleResult filter_target_leak(const Dialogue& dialogue);

// Fails when a terminal turn accepts anything but the target.
RuleResult filter_wrong_acceptance(const Dialogue& dialogue);

// Persona statements (the like/dislike sentences of the general and target
// abstracts) against every seeker utterance; fails on contradiction > delta.
RuleResult filter_persona_contradiction(const Dialogue& dialogue,
                                        const Persona& persona, const NliFn& nli,
                                        const FilterConfig& config);

// Each recommender Think against every prior seeker utterance.
RuleResult filter_guess_contradiction(const Dialogue& dialogue, const NliFn& nli,
                                      const FilterConfig& config);

// "likes: ..." / "dislikes: ..." statements used as NLI premises.
std::vector<std::string> persona_statements(const Persona& persona);

// All five rules, no short-circuit.
FilterVerdict evaluate_dialogue(const Dialogue& dialogue, const NliFn& nli,
                                const FilterConfig& config);

struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::size_t held = 0;  // NLI transport failure, verdict deferred
  double removal_rate = 0.0;  // removed / (total - held)
  std::map<std::string, std::size_t> failures_by_rule;
};

struct FilterOutcome {
  std::vector<FilterVerdict> verdicts;  // per evaluated dialogue, input order
  std::vector<std::string> held_ids;
  FilterReport report;
};

FilterOutcome apply_filters(const std::vector<Dialogue>& dialogues,
                            const NliFn& nli, const FilterConfig& config,
                            int parallelism = 1);

}  // namespace convrec
