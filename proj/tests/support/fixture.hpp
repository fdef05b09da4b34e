#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "convrec/cli.hpp"
#include "convrec/corpus.hpp"
#include "convrec/gateway.hpp"
#include "convrec/gateway_mock.hpp"
#include "convrec/prompts.hpp"
#include "convrec/recommender.hpp"
#include "convrec/summarize.hpp"

namespace convrec::testing {

// Deterministic synthetic review corpus. Every review of an item states the
// item's characteristic phrases ("Loved the ... Disliked the ...") so the
// mock summarizer distills matching user and item abstracts.
struct FixtureCorpus {
  std::vector<std::string> review_lines;
  std::vector<std::string> item_lines;
};

FixtureCorpus make_fixture_corpus(int n_users, int n_items, std::uint64_t seed);

void write_lines(const std::string& path, const std::vector<std::string>& lines);

const std::vector<std::string>& like_phrases();
const std::vector<std::string>& dislike_phrases();

// Mock-backed gateway plus abstracted databases, ready for sessions.
struct MockPipeline {
  std::shared_ptr<Gateway> gateway;
  std::shared_ptr<EmbeddingCache> embedding_cache;
  PromptTemplates templates;
  UserReviewDB user_db;
  ItemReviewDB item_db;
};

MockPipeline make_mock_pipeline(const FixtureCorpus& corpus,
                                int adversarial_period = 0,
                                int embedding_dim = 32);

// Unique scratch directory under the build tree, wiped on creation.
std::string fresh_temp_dir(const std::string& label);

}  // namespace convrec::testing
