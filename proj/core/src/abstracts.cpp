#include "convrec/abstracts.hpp"

#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

namespace {

constexpr std::string_view kLikeHeader = "[like]";
constexpr std::string_view kDislikeHeader = "[dislike]";

bool is_none_marker(std::string_view section) {
  std::string t = text::to_lower(text::trim(section));
  return t.empty() || t == "none" || t == "none.";
}

std::optional<std::string> section_value(std::string_view raw) {
  if (is_none_marker(raw)) return std::nullopt;
  return text::trim(raw);
}

}  // namespace

std::pair<std::optional<std::string>, std::optional<std::string>>
parse_like_dislike(std::string_view completion) {
  const std::string lowered = text::to_lower(completion);
  // "[dislike]" contains no "[like]" substring, so the two finds cannot
  // collide.
  const std::size_t like_pos = lowered.find(kLikeHeader);
  const std::size_t dislike_pos = lowered.find(kDislikeHeader);
  if (like_pos == std::string::npos && dislike_pos == std::string::npos) {
    throw ParseError("no [Like] or [Dislike] header found");
  }

  auto section_after = [&](std::size_t header_pos, std::size_t header_len,
                           std::size_t other_pos) -> std::string_view {
    std::size_t begin = header_pos + header_len;
    std::size_t end = completion.size();
    if (other_pos != std::string::npos && other_pos > header_pos) {
      end = other_pos;
    }
    return completion.substr(begin, end - begin);
  };

  std::optional<std::string> like;
  std::optional<std::string> dislike;
  if (like_pos != std::string::npos) {
    like = section_value(section_after(like_pos, kLikeHeader.size(), dislike_pos));
  }
  if (dislike_pos != std::string::npos) {
    dislike = section_value(
        section_after(dislike_pos, kDislikeHeader.size(), like_pos));
  }
  return {like, dislike};
}

std::string render_like_dislike(const std::optional<std::string>& like,
                                const std::optional<std::string>& dislike) {
  std::string out = "[Like]\n";
  out += like ? *like : "None.";
  out += "\n[Dislike]\n";
  out += dislike ? *dislike : "None.";
  return out;
}

std::string render_abstract(const Abstract& abstract) {
  return render_like_dislike(abstract.like, abstract.dislike);
}

}  // namespace convrec
