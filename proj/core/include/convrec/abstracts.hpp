#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace convrec {

// A like/dislike distillation of one or more reviews.
struct Abstract {
  std::optional<std::string> like;
  std::optional<std::string> dislike;
  std::vector<std::string> source_ids;

  bool valid() const { return like.has_value() || dislike.has_value(); }

  bool operator==(const Abstract&) const = default;
};

// Scans for the "[Like]" / "[Dislike]" headers (case-insensitive, any
// order); each section runs until the other header or end of text. A
// section that is empty or reads "None." (case-insensitive, optional
// period) maps to an absent field. Throws ParseError when neither header
// is present.
std::pair<std::optional<std::string>, std::optional<std::string>>
parse_like_dislike(std::string_view completion);

// Canonical rendering; parse_like_dislike(render_like_dislike(a)) == a.
std::string render_like_dislike(const std::optional<std::string>& like,
                                const std::optional<std::string>& dislike);
std::string render_abstract(const Abstract& abstract);

}  // namespace convrec
