#pragma once

#include <map>
#include <string>
#include <vector>

#include "convrec/abstracts.hpp"
#include "convrec/corpus.hpp"

namespace convrec {

// A chat prompt split into the instruction block (sent as the system
// message) and the data block (sent as the user message).
struct PromptPair {
  std::string system_part;
  std::string user_part;
};

// Template override files hold both parts separated by a line that reads
// exactly "=== user ===".
PromptPair load_prompt_file(const std::string& path);

struct PromptTemplates {
  PromptPair user_review;   // single-review summarization
  PromptPair item_reviews;  // item knowledge summarization
  PromptPair seeker;
  PromptPair recommender;
  std::string seed_seeker;       // scripted opening utterance pair
  std::string seed_recommender;

  static PromptTemplates defaults();
};

// Replaces every "{key}" with its value; an unresolved {placeholder} left
// in the output raises ConfigError naming it.
std::string fill_template(const std::string& tpl,
                          const std::map<std::string, std::string>& values);

struct TurnText {
  bool seeker = false;
  std::string text;
};

std::string render_dialogue_context(const std::vector<TurnText>& turns);

struct PersonaEntryView {
  std::string title;
  const Abstract* abstract = nullptr;
};

// The {user_persona} section: the general review abstracts with their item
// titles.
std::string render_user_persona(const std::vector<PersonaEntryView>& entries);

// The {k_movies_info} / knowledge block: metadata in input-file field order
// followed by the like/dislike abstract.
std::string render_item_knowledge(const ItemRecord& record,
                                  const Abstract& knowledge);

// The {rec_movie_abstract} section for a suggested movie the user had
// reviewed. Empty optional renders as an empty string.
std::string render_responsive_section(const std::string& title,
                                      const Abstract& abstract);

}  // namespace convrec
