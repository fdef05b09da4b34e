#include "convrec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxSelectedReviews = 3;

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(std::string("missing or non-string field '") + key + "'");
  }
  std::string value = j.at(key).get<std::string>();
  if (value.empty()) {
    throw ParseError(std::string("empty field '") + key + "'");
  }
  return value;
}

std::vector<std::string> optional_string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& node = j.at(key);
  if (!node.is_array()) {
    throw ParseError(std::string("field '") + key + "' must be a list");
  }
  for (const auto& item : node) {
    if (!item.is_string()) {
      throw ParseError(std::string("field '") + key + "' must hold strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

json parse_json_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("line is not a JSON object");
  }
  return j;
}

}  // namespace

const std::vector<Review>& UserReviewDB::reviews_for(
    const std::string& user_id) const {
  auto it = users.find(user_id);
  if (it == users.end()) {
    throw NotFoundError("unknown user '" + user_id + "'");
  }
  return it->second;
}

const Review* UserReviewDB::find_review(const std::string& user_id,
                                        const std::string& item_id) const {
  auto it = users.find(user_id);
  if (it == users.end()) return nullptr;
  for (const Review& r : it->second) {
    if (r.item_id == item_id) return &r;
  }
  return nullptr;
}

const ItemEntry& ItemReviewDB::entry_for(const std::string& item_id) const {
  auto it = items.find(item_id);
  if (it == items.end()) {
    throw NotFoundError("unknown item '" + item_id + "'");
  }
  return it->second;
}

RawReviewRecord parse_review_record(std::string_view json_line) {
  json j = parse_json_line(json_line);
  RawReviewRecord rec;
  rec.user_id = require_string(j, "user_id");
  rec.item_id = require_string(j, "item_id");
  rec.title = j.value("title", std::string());
  if (!j.contains("rating") || !j.at("rating").is_number_integer()) {
    throw ParseError("rating must be an integer");
  }
  rec.rating = j.at("rating").get<int>();
  if (rec.rating < 1 || rec.rating > 10) {
    throw ParseError("rating out of range 1..10");
  }
  rec.text = j.value("text", std::string());
  if (j.contains("votes")) {
    if (!j.at("votes").is_number_integer()) {
      throw ParseError("votes must be an integer");
    }
    rec.votes = j.at("votes").get<std::int64_t>();
    if (rec.votes < 0) throw ParseError("votes must be non-negative");
  }
  return rec;
}

ItemRecord parse_item_record(std::string_view json_line) {
  json j = parse_json_line(json_line);
  ItemRecord rec;
  rec.item_id = require_string(j, "item_id");
  rec.title = require_string(j, "title");
  rec.genre = optional_string_list(j, "genre");
  rec.director = optional_string_list(j, "director");
  rec.cast = optional_string_list(j, "cast");
  return rec;
}

std::vector<Review> select_top_reviews(const std::vector<Review>& reviews,
                                       std::size_t limit) {
  std::vector<std::size_t> order(reviews.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return reviews[a].votes > reviews[b].votes;
  });
  std::vector<Review> out;
  out.reserve(std::min(limit, reviews.size()));
  for (std::size_t i = 0; i < order.size() && out.size() < limit; ++i) {
    out.push_back(reviews[order[i]]);
  }
  return out;
}

IngestResult ingest_reviews(const std::vector<std::string>& review_lines,
                            const std::vector<std::string>& item_lines) {
  IngestResult result;
  IngestReport& report = result.report;

  for (std::size_t i = 0; i < item_lines.size(); ++i) {
    if (text::trim(item_lines[i]).empty()) continue;
    try {
      ItemRecord rec = parse_item_record(item_lines[i]);
      ItemEntry entry;
      entry.record = std::move(rec);
      result.item_db.items[entry.record.item_id] = std::move(entry);
    } catch (const ParseError& e) {
      report.item_errors.push_back({i + 1, e.what()});
    }
  }
  report.items_kept = result.item_db.items.size();

  // Dedup by (user, item): keep the record with more votes, first seen on
  // ties. Input order is preserved for the survivors.
  std::vector<Review> kept;
  std::unordered_map<std::string, std::size_t> index_by_pair;
  for (std::size_t i = 0; i < review_lines.size(); ++i) {
    if (text::trim(review_lines[i]).empty()) continue;
    ++report.reviews_in;
    RawReviewRecord rec;
    try {
      rec = parse_review_record(review_lines[i]);
    } catch (const ParseError& e) {
      report.review_errors.push_back({i + 1, e.what()});
      continue;
    }
    if (!result.item_db.items.count(rec.item_id)) {
      ++report.reviews_dropped_unknown_item;
      continue;
    }
    Review review;
    review.user_id = rec.user_id;
    review.item_id = rec.item_id;
    review.title = rec.title.empty()
                       ? result.item_db.items.at(rec.item_id).record.title
                       : rec.title;
    review.rating = rec.rating;
    review.text = rec.text;
    review.votes = rec.votes;

    std::string pair_key = rec.user_id + "\x1f" + rec.item_id;
    auto it = index_by_pair.find(pair_key);
    if (it == index_by_pair.end()) {
      index_by_pair.emplace(std::move(pair_key), kept.size());
      kept.push_back(std::move(review));
    } else {
      ++report.reviews_deduped;
      if (review.votes > kept[it->second].votes) {
        kept[it->second] = std::move(review);
      }
    }
  }
  report.reviews_kept = kept.size();

  std::unordered_map<std::string, std::vector<Review>> by_item;
  for (const Review& r : kept) {
    result.user_db.users[r.user_id].push_back(r);
    by_item[r.item_id].push_back(r);
  }
  report.users = result.user_db.users.size();

  for (auto& [item_id, reviews] : by_item) {
    result.item_db.items.at(item_id).selected =
        select_top_reviews(reviews, kMaxSelectedReviews);
  }
  return result;
}

IngestResult ingest_review_files(const std::string& reviews_path,
                                 const std::string& items_path) {
  auto read_lines = [](const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) {
      throw ConfigError("cannot open input file '" + path + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
  };
  return ingest_reviews(read_lines(reviews_path), read_lines(items_path));
}

const std::vector<Review>& select_item_reviews(const ItemReviewDB& db,
                                               const std::string& item_id) {
  return db.entry_for(item_id).selected;
}

std::vector<Review> eligible_target_items(const UserReviewDB& db,
                                          const std::string& user_id) {
  const std::vector<Review>& reviews = db.reviews_for(user_id);
  std::vector<Review> out;
  for (const Review& r : reviews) {
    if (r.rating >= kTargetRatingFloor) out.push_back(r);
  }
  return out;
}

}  // namespace convrec
