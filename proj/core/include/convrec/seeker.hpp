#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convrec/gateway.hpp"
#include "convrec/persona.hpp"
#include "convrec/prompts.hpp"

namespace convrec {

inline constexpr const char* kEndToken = "[EOD]";

struct SeekerTurn {
  std::string text;  // end token stripped
  std::optional<std::string> accepted_item_id;
  bool is_terminal = false;
};

// terminal iff "[EOD]" occurs anywhere (case-sensitive, bracketed);
// clean_text has the token and surrounding whitespace removed.
std::pair<std::string, bool> detect_termination(const std::string& raw);

// The suggestion the seeker is reacting to.
struct LastRecommendation {
  std::string item_id;
  std::string title;
};

struct SeekerPrompt {
  ChatRequest request;
  std::string feature_section;  // the target-features block, for auditing
};

// Assembles the seeker prompt. Only the target abstract text is ever
// interpolated into the feature section, never the target title.
SeekerPrompt build_seeker_prompt(const PromptTemplates& templates,
                                 const Persona& persona,
                                 const std::vector<TurnText>& context,
                                 const std::optional<LastRecommendation>& last_rec,
                                 const std::optional<Abstract>& responsive,
                                 double temperature, int max_tokens,
                                 std::optional<std::uint64_t> seed);

class SeekerSim {
 public:
  SeekerSim(Gateway& gateway, PromptTemplates templates, double temperature,
            int max_tokens)
      : gateway_(gateway),
        templates_(std::move(templates)),
        temperature_(temperature),
        max_tokens_(max_tokens) {}

  // Context's last turn must be a recommender turn. Terminal turns adopt
  // last_rec as the accepted item; a terminal turn with empty text or no
  // preceding recommendation raises SimulatorError.
  SeekerTurn next_utterance(const Persona& persona,
                            const std::vector<TurnText>& context,
                            const std::optional<LastRecommendation>& last_rec,
                            const std::optional<Abstract>& responsive,
                            std::optional<std::uint64_t> seed);

 private:
  Gateway& gateway_;
  PromptTemplates templates_;
  double temperature_;
  int max_tokens_;
};

}  // namespace convrec
