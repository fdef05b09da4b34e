#include "convrec/seeker.hpp"

#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

std::pair<std::string, bool> detect_termination(const std::string& raw) {
  std::string out = raw;
  bool terminal = false;
  std::size_t pos;
  while ((pos = out.find(kEndToken)) != std::string::npos) {
    terminal = true;
    out.erase(pos, std::string(kEndToken).size());
    // Squeeze the whitespace the token sat between.
    while (pos > 0 && pos < out.size() && out[pos] == ' ' &&
           out[pos - 1] == ' ') {
      out.erase(pos, 1);
    }
  }
  return {text::trim(out), terminal};
}

SeekerPrompt build_seeker_prompt(const PromptTemplates& templates,
                                 const Persona& persona,
                                 const std::vector<TurnText>& context,
                                 const std::optional<LastRecommendation>& last_rec,
                                 const std::optional<Abstract>& responsive,
                                 double temperature, int max_tokens,
                                 std::optional<std::uint64_t> seed) {
  std::vector<PersonaEntryView> entries;
  entries.reserve(persona.general.size());
  for (const PersonaReview& r : persona.general) {
    entries.push_back({r.title, &r.abstract});
  }

  // The feature block carries only the abstract text; the target title
  // appears solely in the instruction lines above it.
  std::string feature_section = render_abstract(persona.target_abstract);

  std::string responsive_section;
  if (responsive && last_rec) {
    responsive_section = render_responsive_section(last_rec->title, *responsive);
  }

  SeekerPrompt prompt;
  prompt.feature_section = feature_section;
  prompt.request.system_prompt = fill_template(
      templates.seeker.system_part, {{"gt_movie_title", persona.target_title}});
  prompt.request.user_prompt =
      fill_template(templates.seeker.user_part,
                    {{"user_persona", render_user_persona(entries)},
                     {"gt_abstract", feature_section},
                     {"rec_movie_abstract", responsive_section},
                     {"dialogue_context", render_dialogue_context(context)}});
  prompt.request.temperature = temperature;
  prompt.request.max_tokens = max_tokens;
  prompt.request.seed = seed;
  return prompt;
}

SeekerTurn SeekerSim::next_utterance(
    const Persona& persona, const std::vector<TurnText>& context,
    const std::optional<LastRecommendation>& last_rec,
    const std::optional<Abstract>& responsive,
    std::optional<std::uint64_t> seed) {
  if (context.empty() || context.back().seeker) {
    throw PreconditionError("seeker turn requires a recommender turn last");
  }

  SeekerPrompt prompt = build_seeker_prompt(templates_, persona, context,
                                            last_rec, responsive, temperature_,
                                            max_tokens_, seed);
  std::string completion = gateway_.chat(prompt.request);

  auto [clean, terminal] = detect_termination(completion);
  SeekerTurn turn;
  turn.text = clean;
  turn.is_terminal = terminal;
  if (terminal) {
    if (clean.empty()) {
      throw SimulatorError("terminal seeker turn with empty text");
    }
    if (!last_rec) {
      throw SimulatorError("seeker ended the dialogue before any recommendation");
    }
    turn.accepted_item_id = last_rec->item_id;
  }
  if (turn.text.empty()) {
    throw SimulatorError("seeker produced an empty utterance");
  }
  return turn;
}

}  // namespace convrec
