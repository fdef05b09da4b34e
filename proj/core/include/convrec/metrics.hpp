#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convrec/gateway.hpp"

namespace convrec {

struct TranscriptTurn {
  bool seeker = false;
  std::string text;
};

struct TranscriptDialogue {
  std::string id;
  std::vector<TranscriptTurn> turns;
};

// Mean count of distinct word n-grams over each dialogue's concatenated
// seeker utterances. Rejects empty corpora and dialogues with no seeker
// text with MetricError.
double ngram_specificity(const std::vector<TranscriptDialogue>& corpus, int n);

// Mean embedding cosine over a seeded uniform sample of unordered dialogue
// pairs (all pairs when the corpus is small enough). Each dialogue is
// embedded once from its concatenated seeker utterances.
double inter_dialogue_similarity(const std::vector<TranscriptDialogue>& corpus,
                                 std::size_t pair_sample_size,
                                 std::uint64_t seed, Gateway& gateway);

// Mean whitespace-token count per recommender utterance, with maximal runs
// of consecutive recommender utterances merged first.
double avg_recommender_words(const std::vector<TranscriptDialogue>& corpus);

// Distinct n-grams across all responses divided by the total n-gram count.
// Throws MetricError when no response yields an n-gram.
double distinct_n(const std::vector<std::string>& responses, int n);

struct RankedEpisode {
  std::vector<std::string> ranking;  // duplicate-free
  std::string target;
};

// Fraction of episodes whose target appears within the first k ranked ids.
double recall_at_k(const std::vector<RankedEpisode>& episodes, int k);

struct MetricsConfig {
  std::vector<int> specificity_ns = {2, 3, 4};
  std::vector<int> distinct_ns = {3, 4};
  std::vector<int> recall_ks = {1, 10, 50};
  std::size_t pair_sample_size = 1000;
  std::uint64_t seed = 0;
  bool with_similarity = true;
};

struct MetricsReport {
  std::string tokenizer;
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::size_t users = 0;  // 0 when the corpus format does not carry them
  std::size_t items = 0;
  std::map<int, double> specificity;
  std::optional<double> inter_dialogue_similarity;
  double avg_recommender_words = 0.0;
  std::map<int, double> distinct_n;  // over recommender utterances
  std::map<int, double> recall_at_k;
};

MetricsReport compute_metrics(const std::vector<TranscriptDialogue>& corpus,
                              const MetricsConfig& config, Gateway* gateway,
                              const std::vector<RankedEpisode>* episodes);

// Plain-text table of the report.
std::string format_metrics_table(const MetricsReport& report);

}  // namespace convrec
