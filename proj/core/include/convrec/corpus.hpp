#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convrec/abstracts.hpp"

namespace convrec {

// One line of the review input file.
struct RawReviewRecord {
  std::string user_id;
  std::string item_id;
  std::string title;
  int rating = 0;  // 1..10
  std::string text;
  std::int64_t votes = 0;
};

// One line of the item input file.
struct ItemRecord {
  std::string item_id;
  std::string title;  // includes release year
  std::vector<std::string> genre;
  std::vector<std::string> director;
  std::vector<std::string> cast;
};

struct Review {
  std::string user_id;
  std::string item_id;
  std::string title;
  int rating = 0;
  std::string text;
  std::int64_t votes = 0;
  std::optional<Abstract> abstract;
};

inline std::string review_id(const Review& review) {
  return review.user_id + ":" + review.item_id;
}

struct UserReviewDB {
  // user_id -> reviews in input order, no duplicate item_id per user.
  std::map<std::string, std::vector<Review>> users;

  const std::vector<Review>& reviews_for(const std::string& user_id) const;
  const Review* find_review(const std::string& user_id,
                            const std::string& item_id) const;
};

struct ItemEntry {
  ItemRecord record;
  std::vector<Review> selected;  // <= 3, sorted by votes descending
  std::optional<Abstract> knowledge;
};

struct ItemReviewDB {
  std::map<std::string, ItemEntry> items;

  const ItemEntry& entry_for(const std::string& item_id) const;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t reviews_in = 0;
  std::size_t reviews_kept = 0;
  std::size_t reviews_deduped = 0;
  std::size_t reviews_dropped_unknown_item = 0;
  std::size_t items_kept = 0;
  std::size_t users = 0;
  std::vector<RecordError> review_errors;
  std::vector<RecordError> item_errors;
};

// Field validation shared by the line parsers; throws ParseError.
RawReviewRecord parse_review_record(std::string_view json_line);
ItemRecord parse_item_record(std::string_view json_line);

// Builds both databases. Duplicate (user, item) pairs keep the record with
// more votes (ties keep the first seen); reviews for unknown items are
// dropped and counted. Malformed lines are recorded with their line number
// and skipped. Empty inputs yield empty databases.
struct IngestResult {
  UserReviewDB user_db;
  ItemReviewDB item_db;
  IngestReport report;
};
IngestResult ingest_reviews(const std::vector<std::string>& review_lines,
                            const std::vector<std::string>& item_lines);
IngestResult ingest_review_files(const std::string& reviews_path,
                                 const std::string& items_path);

// The top-(limit) reviews by votes descending, ties kept in input order.
std::vector<Review> select_top_reviews(const std::vector<Review>& reviews,
                                       std::size_t limit);

// Selected reviews for an item (<= 3). Throws NotFoundError.
const std::vector<Review>& select_item_reviews(const ItemReviewDB& db,
                                               const std::string& item_id);

inline constexpr int kTargetRatingFloor = 8;

// The user's reviews rated >= 8, in input order. Throws NotFoundError.
std::vector<Review> eligible_target_items(const UserReviewDB& db,
                                          const std::string& user_id);

}  // namespace convrec
