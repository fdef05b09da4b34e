#include "support/fixture.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "convrec/util.hpp"

namespace convrec::testing {

namespace {

using nlohmann::json;

const std::vector<std::string> kLikes = {
    "gritty tank warfare",        "slow burn courtroom tension",
    "sweeping orchestral score",  "claustrophobic submarine setting",
    "deadpan ensemble comedy",    "hand drawn animation style",
    "meticulous heist planning",  "windswept frontier landscapes",
    "razor sharp dialogue",       "haunting folk soundtrack",
    "inventive time loop plotting", "grounded space survival drama",
    "neon soaked city visuals",   "quiet character study moments",
    "labyrinthine spy intrigue",  "practical creature effects",
    "breakneck chase choreography", "wry political satire",
    "tender coming of age arc",   "stark nordic noir atmosphere",
    "lavish period costumes",     "crackling courtroom monologues",
    "underwater photography",     "sprawling desert vistas",
    "playful fourth wall humor",  "brooding antihero lead",
    "intricate puzzle box structure", "rousing training montages",
    "bittersweet ending notes",   "kinetic camera work"};

const std::vector<std::string> kDislikes = {
    "choppy editing",          "meandering second act",
    "wooden line delivery",    "intrusive narration",
    "predictable twist reveals", "muddy night photography",
    "overbearing product placement", "abrupt ending",
    "cartoonish villains",     "shaky handheld camerawork",
    "bloated runtime",         "clunky exposition dumps",
    "jarring tonal shifts",    "thin supporting roles",
    "dated visual effects"};

const std::vector<std::string> kAdjectives = {
    "Iron",    "Silent", "Crimson",  "Hollow", "Velvet",
    "Broken",  "Northern", "Golden", "Savage", "Paper",
    "Winter",  "Burning", "Distant", "Midnight", "Lonely",
    "Emerald", "Rusty",  "Frozen",   "Painted", "Final"};

const std::vector<std::string> kNouns = {
    "Meridian", "Harbor",   "Orchard",      "Signal",   "Lantern",
    "Furrow",   "Causeway", "Echo",         "Bastion",  "Crossing",
    "Parallel", "Monsoon",  "Vigil",        "Cartographer", "Divide",
    "Sonata",   "Garrison", "Ember",        "Threshold", "Covenant"};

const std::vector<std::string> kGenres = {
    "Action", "Drama", "Comedy", "Thriller", "Documentary",
    "Western", "Animation", "Mystery"};

const std::vector<std::string> kDirectors = {
    "R. Calloway", "M. Oyelaran", "T. Brandt",    "S. Ferreira",
    "L. Okafor",   "J. Marsh",    "P. Lindqvist", "A. Beaumont"};

const std::vector<std::string> kCast = {
    "D. Mercer",      "K. Ashworth", "Y. Tanaka",  "E. Sorensen",
    "F. Dubois",      "H. Okonkwo",  "V. Castellanos", "N. Pryce",
    "O. Lindgren",    "C. Whitfield"};

struct FixtureItem {
  std::string item_id;
  std::string title;
  std::string like;
  std::string dislike;  // empty for some items
};

std::vector<FixtureItem> make_items(int n_items, Rng& rng) {
  std::vector<FixtureItem> items;
  items.reserve(static_cast<std::size_t>(n_items));
  for (int i = 0; i < n_items; ++i) {
    FixtureItem item;
    char id[16];
    std::snprintf(id, sizeof(id), "m%03d", i + 1);
    item.item_id = id;
    int year = 1965 + static_cast<int>((i * 7) % 55);
    item.title = kAdjectives[static_cast<std::size_t>(i) % kAdjectives.size()] +
                 " " +
                 kNouns[(static_cast<std::size_t>(i) / kAdjectives.size()) %
                        kNouns.size()] +
                 " (" + std::to_string(year) + ")";
    item.like = kLikes[static_cast<std::size_t>(i) % kLikes.size()];
    if (rng.below(10) < 7) {
      item.dislike = kDislikes[static_cast<std::size_t>(i) % kDislikes.size()];
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

const std::vector<std::string>& like_phrases() { return kLikes; }
const std::vector<std::string>& dislike_phrases() { return kDislikes; }

FixtureCorpus make_fixture_corpus(int n_users, int n_items, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FixtureItem> items = make_items(n_items, rng);

  FixtureCorpus corpus;
  for (const FixtureItem& item : items) {
    json j;
    j["item_id"] = item.item_id;
    j["title"] = item.title;
    j["genre"] = json::array(
        {kGenres[fnv1a(item.item_id) % kGenres.size()]});
    j["director"] = json::array(
        {kDirectors[fnv1a(item.item_id, 7) % kDirectors.size()]});
    j["cast"] = json::array(
        {kCast[fnv1a(item.item_id, 11) % kCast.size()],
         kCast[fnv1a(item.item_id, 13) % kCast.size()]});
    corpus.item_lines.push_back(j.dump());
  }

  for (int u = 0; u < n_users; ++u) {
    char id[16];
    std::snprintf(id, sizeof(id), "u%03d", u + 1);
    const std::string user_id = id;
    const int n_reviews = 6 + static_cast<int>(rng.below(4));

    std::set<std::size_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(n_reviews)) {
      chosen.insert(static_cast<std::size_t>(rng.below(items.size())));
    }
    int index = 0;
    for (std::size_t item_index : chosen) {
      const FixtureItem& item = items[item_index];
      // The first two reviews rate high so every user has eligible targets.
      int rating = index < 2 ? 8 + static_cast<int>(rng.below(3))
                             : 2 + static_cast<int>(rng.below(8));
      std::string body = "Loved the " + item.like + ".";
      if (!item.dislike.empty()) {
        body += " Disliked the " + item.dislike + ".";
      }
      json j;
      j["user_id"] = user_id;
      j["item_id"] = item.item_id;
      j["title"] = item.title;
      j["rating"] = rating;
      j["text"] = body;
      j["votes"] = static_cast<std::int64_t>(rng.below(40));
      corpus.review_lines.push_back(j.dump());
      ++index;
    }
  }
  return corpus;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::filesystem::path p(path);
  if (!p.parent_path().empty()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  for (const std::string& line : lines) out << line << "\n";
}

MockPipeline make_mock_pipeline(const FixtureCorpus& corpus,
                                int adversarial_period, int embedding_dim) {
  MockPipeline pipeline;
  pipeline.templates = PromptTemplates::defaults();

  MockChatOptions chat_options;
  chat_options.adversarial_period = adversarial_period;
  GatewayOptions gateway_options;
  gateway_options.retry.backoff_base_ms = 1;
  pipeline.gateway = std::make_shared<Gateway>(
      std::make_shared<MockChatBackend>(chat_options),
      std::make_shared<MockEmbeddingBackend>(embedding_dim),
      std::make_shared<MockNliBackend>(), gateway_options);
  pipeline.embedding_cache = std::make_shared<EmbeddingCache>();

  IngestResult ingest = ingest_reviews(corpus.review_lines, corpus.item_lines);
  pipeline.user_db = std::move(ingest.user_db);
  pipeline.item_db = std::move(ingest.item_db);

  Summarizer summarizer(*pipeline.gateway, AbstractCache(), pipeline.templates);
  summarizer.abstract_corpus(pipeline.user_db, pipeline.item_db, 4);
  return pipeline;
}

std::string fresh_temp_dir(const std::string& label) {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("convrec-test-" + label);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace convrec::testing
