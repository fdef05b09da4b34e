#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convrec/abstracts.hpp"
#include "convrec/corpus.hpp"

namespace convrec {

struct PersonaReview {
  std::string item_id;
  std::string title;
  int rating = 0;
  Abstract abstract;
};

// A seeker's grounding bundle, drawn from one real user's abstracted
// reviews. The target never appears among the general three.
struct Persona {
  std::string user_id;
  std::vector<PersonaReview> general;  // exactly 3
  std::string target_item_id;
  std::string target_title;
  int target_rating = 0;
  Abstract target_abstract;
  std::uint64_t seed = 0;
};

// Target drawn uniformly from the user's abstracted reviews rated >= 8;
// general = 3 uniform draws without replacement from the remaining
// abstracted reviews. Deterministic given rng_seed. Throws
// IneligibleUserError when the user lacks 4 abstracted reviews or an
// eligible target.
Persona build_persona(const UserReviewDB& db, const std::string& user_id,
                      std::uint64_t rng_seed);

// The user's own abstract of item_id, absent when the user never reviewed
// it (or the review was not abstracted).
std::optional<Abstract> responsive_preference(const UserReviewDB& db,
                                              const std::string& user_id,
                                              const std::string& item_id);

}  // namespace convrec
