#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convrec/corpus.hpp"
#include "convrec/gateway.hpp"
#include "convrec/prompts.hpp"

namespace convrec {

// Disk memo of summarization results keyed by (prompt hash, model tag).
// Writes are temp-then-rename so concurrent writers are safe.
class AbstractCache {
 public:
  explicit AbstractCache(std::string dir) : dir_(std::move(dir)) {}
  AbstractCache() = default;  // disabled cache

  bool enabled() const { return !dir_.empty(); }
  std::optional<Abstract> get(const std::string& prompt,
                              const std::string& model_tag) const;
  void put(const std::string& prompt, const std::string& model_tag,
           const Abstract& abstract) const;

 private:
  std::string key_path(const std::string& prompt,
                       const std::string& model_tag) const;
  std::string dir_;
};

struct SummarizerOptions {
  double temperature = 0.0;
  int max_tokens = 512;
};

class Summarizer {
 public:
  Summarizer(Gateway& gateway, AbstractCache cache, PromptTemplates templates,
             SummarizerOptions options = {})
      : gateway_(gateway),
        cache_(std::move(cache)),
        templates_(std::move(templates)),
        options_(options) {}

  // Fills the review summarization prompt, parses the completion, re-asks
  // up to twice with a format reminder, and raises AbstractionError when
  // the output stays unusable or distills to neither a like nor a dislike.
  Abstract summarize_user_review(const Review& review);

  Abstract summarize_item_reviews(const ItemRecord& item,
                                  const std::vector<Review>& reviews);

  // Abstracts every user review and every item with selected reviews, in
  // place. Failures are recorded and the affected review/item left
  // unabstracted.
  struct CorpusReport {
    std::size_t reviews_abstracted = 0;
    std::size_t reviews_failed = 0;
    std::size_t items_abstracted = 0;
    std::size_t items_failed = 0;
  };
  CorpusReport abstract_corpus(UserReviewDB& user_db, ItemReviewDB& item_db,
                               int parallelism);

 private:
  Abstract complete_and_parse(const std::string& system_prompt,
                              const std::string& user_prompt,
                              std::vector<std::string> source_ids);

  Gateway& gateway_;
  AbstractCache cache_;
  PromptTemplates templates_;
  SummarizerOptions options_;
};

}  // namespace convrec
