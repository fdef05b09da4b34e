#include "convrec/summarize.hpp"

#include <filesystem>

#include <json.hpp>

#include "convrec/io.hpp"
#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

namespace {

using nlohmann::json;

constexpr int kMaxAsks = 3;  // first ask + two re-asks

const char* kFormatReminder =
    "\n\nRemember to answer with the [Like] and [Dislike] tags, writing "
    "\"None.\" under a tag that has nothing to mention.";

}  // namespace

std::string AbstractCache::key_path(const std::string& prompt,
                                    const std::string& model_tag) const {
  std::uint64_t h = fnv1a(prompt, fnv1a(model_tag));
  return dir_ + "/" + hex64(h) + ".json";
}

std::optional<Abstract> AbstractCache::get(const std::string& prompt,
                                           const std::string& model_tag) const {
  if (!enabled()) return std::nullopt;
  std::string path = key_path(prompt, model_tag);
  if (!io::file_exists(path)) return std::nullopt;
  json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return io::abstract_from_json(j);
}

void AbstractCache::put(const std::string& prompt, const std::string& model_tag,
                        const Abstract& abstract) const {
  if (!enabled()) return;
  std::filesystem::create_directories(dir_);
  io::write_file_atomic(key_path(prompt, model_tag),
                        io::abstract_to_json(abstract).dump());
}

Abstract Summarizer::complete_and_parse(const std::string& system_prompt,
                                        const std::string& user_prompt,
                                        std::vector<std::string> source_ids) {
  const std::string cache_key = system_prompt + "\n\n" + user_prompt;
  if (auto cached = cache_.get(cache_key, gateway_.chat_tag())) {
    gateway_.count_cache_hit();
    cached->source_ids = std::move(source_ids);
    return *cached;
  }

  ChatRequest request;
  request.system_prompt = system_prompt;
  request.user_prompt = user_prompt;
  request.temperature = options_.temperature;
  request.max_tokens = options_.max_tokens;
  request.seed = fnv1a(cache_key);

  std::string last_error;
  for (int ask = 0; ask < kMaxAsks; ++ask) {
    ChatRequest attempt = request;
    if (ask > 0) attempt.user_prompt += kFormatReminder;
    std::string completion = gateway_.chat(attempt);
    try {
      auto [like, dislike] = parse_like_dislike(completion);
      if (!like && !dislike) {
        last_error = "completion distilled to neither like nor dislike";
        continue;
      }
      Abstract abstract;
      abstract.like = std::move(like);
      abstract.dislike = std::move(dislike);
      cache_.put(cache_key, gateway_.chat_tag(), abstract);
      abstract.source_ids = std::move(source_ids);
      return abstract;
    } catch (const ParseError& e) {
      last_error = e.what();
    }
  }
  throw AbstractionError("summarization unusable after " +
                         std::to_string(kMaxAsks) + " asks: " + last_error);
}

Abstract Summarizer::summarize_user_review(const Review& review) {
  if (text::trim(review.text).empty()) {
    throw PreconditionError("review text is empty");
  }
  std::string system_prompt = templates_.user_review.system_part;
  std::string user_prompt =
      fill_template(templates_.user_review.user_part, {{"review", review.text}});
  return complete_and_parse(system_prompt, user_prompt, {review_id(review)});
}

Abstract Summarizer::summarize_item_reviews(const ItemRecord& item,
                                            const std::vector<Review>& reviews) {
  if (reviews.empty()) {
    throw PreconditionError("item summarization needs at least one review");
  }
  std::vector<std::string> bodies;
  std::vector<std::string> ids;
  for (const Review& r : reviews) {
    bodies.push_back(r.text);
    ids.push_back(review_id(r));
  }
  std::map<std::string, std::string> values = {
      {"movie_title", item.title},
      {"genre", text::join(item.genre, ", ")},
      {"director", text::join(item.director, ", ")},
      {"cast", text::join(item.cast, ", ")},
      {"reviews", text::join(bodies, "\n")},
  };
  std::string system_prompt =
      fill_template(templates_.item_reviews.system_part, values);
  std::string user_prompt =
      fill_template(templates_.item_reviews.user_part, values);
  return complete_and_parse(system_prompt, user_prompt, std::move(ids));
}

Summarizer::CorpusReport Summarizer::abstract_corpus(UserReviewDB& user_db,
                                                     ItemReviewDB& item_db,
                                                     int parallelism) {
  CorpusReport report;
  std::mutex mu;

  std::vector<Review*> reviews;
  for (auto& [user_id, list] : user_db.users) {
    for (Review& r : list) {
      if (!r.abstract) reviews.push_back(&r);
    }
  }
  parallel_for(reviews.size(), parallelism, [&](std::size_t i) {
    try {
      Abstract a = summarize_user_review(*reviews[i]);
      std::lock_guard<std::mutex> lock(mu);
      reviews[i]->abstract = std::move(a);
      ++report.reviews_abstracted;
    } catch (const AbstractionError&) {
      std::lock_guard<std::mutex> lock(mu);
      ++report.reviews_failed;
    }
  });

  std::vector<ItemEntry*> entries;
  for (auto& [item_id, entry] : item_db.items) {
    if (!entry.knowledge && !entry.selected.empty()) entries.push_back(&entry);
  }
  parallel_for(entries.size(), parallelism, [&](std::size_t i) {
    try {
      Abstract a = summarize_item_reviews(entries[i]->record, entries[i]->selected);
      std::lock_guard<std::mutex> lock(mu);
      entries[i]->knowledge = std::move(a);
      ++report.items_abstracted;
    } catch (const AbstractionError&) {
      std::lock_guard<std::mutex> lock(mu);
      ++report.items_failed;
    }
  });
  return report;
}

}  // namespace convrec
