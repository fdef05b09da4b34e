#include "convrec/persona.hpp"

#include "convrec/util.hpp"

namespace convrec {

namespace {
constexpr std::size_t kGeneralCount = 3;
}

Persona build_persona(const UserReviewDB& db, const std::string& user_id,
                      std::uint64_t rng_seed) {
  const std::vector<Review>& reviews = db.reviews_for(user_id);

  std::vector<const Review*> abstracted;
  for (const Review& r : reviews) {
    if (r.abstract.has_value()) abstracted.push_back(&r);
  }
  if (abstracted.size() < kGeneralCount + 1) {
    throw IneligibleUserError("user '" + user_id + "' has only " +
                              std::to_string(abstracted.size()) +
                              " abstracted reviews (need 4)");
  }

  std::vector<const Review*> eligible;
  for (const Review* r : abstracted) {
    if (r->rating >= kTargetRatingFloor) eligible.push_back(r);
  }
  if (eligible.empty()) {
    throw IneligibleUserError("user '" + user_id +
                              "' has no review rated >= 8 to target");
  }

  Rng rng(rng_seed);
  const Review* target = eligible[rng.below(eligible.size())];

  std::vector<const Review*> remaining;
  for (const Review* r : abstracted) {
    if (r != target) remaining.push_back(r);
  }
  Persona persona;
  persona.user_id = user_id;
  persona.seed = rng_seed;
  persona.target_item_id = target->item_id;
  persona.target_title = target->title;
  persona.target_rating = target->rating;
  persona.target_abstract = *target->abstract;

  for (std::size_t i = 0; i < kGeneralCount; ++i) {
    std::size_t pick = rng.below(remaining.size());
    const Review* r = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    persona.general.push_back({r->item_id, r->title, r->rating, *r->abstract});
  }
  return persona;
}

std::optional<Abstract> responsive_preference(const UserReviewDB& db,
                                              const std::string& user_id,
                                              const std::string& item_id) {
  const Review* review = db.find_review(user_id, item_id);
  if (!review || !review->abstract.has_value()) return std::nullopt;
  return review->abstract;
}

}  // namespace convrec
