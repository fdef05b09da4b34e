#include "convrec/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "convrec/text.hpp"

namespace convrec {

namespace {

std::string concatenated_seeker_text(const TranscriptDialogue& dialogue) {
  std::vector<std::string> parts;
  for (const TranscriptTurn& t : dialogue.turns) {
    if (t.seeker) parts.push_back(t.text);
  }
  return text::join(parts, " ");
}

}  // namespace

double ngram_specificity(const std::vector<TranscriptDialogue>& corpus, int n) {
  if (n < 1) throw MetricError("n must be >= 1");
  if (corpus.empty()) throw MetricError("specificity is undefined on an empty corpus");

  double sum = 0.0;
  for (const TranscriptDialogue& d : corpus) {
    std::vector<std::string> tokens = text::tokenize(concatenated_seeker_text(d));
    if (tokens.empty()) {
      throw MetricError("dialogue '" + d.id + "' has no seeker tokens");
    }
    std::set<std::string> distinct;
    for (auto& g : text::ngrams(tokens, n)) distinct.insert(std::move(g));
    sum += static_cast<double>(distinct.size());
  }
  return sum / static_cast<double>(corpus.size());
}

double inter_dialogue_similarity(const std::vector<TranscriptDialogue>& corpus,
                                 std::size_t pair_sample_size,
                                 std::uint64_t seed, Gateway& gateway) {
  if (corpus.size() < 2) {
    throw MetricError("inter-dialogue similarity needs at least two dialogues");
  }
  if (pair_sample_size == 0) throw MetricError("pair sample size must be >= 1");

  const std::size_t n = corpus.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t all_pairs = n * (n - 1) / 2;
  if (all_pairs <= pair_sample_size) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    Rng rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < pair_sample_size) {
      std::size_t i = static_cast<std::size_t>(rng.below(n));
      std::size_t j = static_cast<std::size_t>(rng.below(n));
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      chosen.emplace(i, j);
    }
    pairs.assign(chosen.begin(), chosen.end());
  }

  std::vector<std::optional<EmbeddingVector>> embeddings(n);
  auto embedding_of = [&](std::size_t i) -> const EmbeddingVector& {
    if (!embeddings[i]) {
      embeddings[i] = gateway.embed(concatenated_seeker_text(corpus[i]));
    }
    return *embeddings[i];
  };

  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    sum += cosine_similarity(embedding_of(i), embedding_of(j));
  }
  return sum / static_cast<double>(pairs.size());
}

double avg_recommender_words(const std::vector<TranscriptDialogue>& corpus) {
  if (corpus.empty()) throw MetricError("empty corpus");
  std::size_t merged_count = 0;
  std::size_t word_sum = 0;
  for (const TranscriptDialogue& d : corpus) {
    std::optional<std::string> run;
    auto flush = [&] {
      if (!run) return;
      word_sum += text::whitespace_tokens(*run).size();
      ++merged_count;
      run.reset();
    };
    for (const TranscriptTurn& t : d.turns) {
      if (t.seeker) {
        flush();
      } else if (run) {
        *run += " " + t.text;
      } else {
        run = t.text;
      }
    }
    flush();
  }
  if (merged_count == 0) throw MetricError("corpus has no recommender utterances");
  return static_cast<double>(word_sum) / static_cast<double>(merged_count);
}

double distinct_n(const std::vector<std::string>& responses, int n) {
  if (n < 1) throw MetricError("n must be >= 1");
  std::set<std::string> distinct;
  std::size_t total = 0;
  for (const std::string& response : responses) {
    std::vector<std::string> tokens = text::tokenize(response);
    for (auto& g : text::ngrams(tokens, n)) {
      ++total;
      distinct.insert(std::move(g));
    }
  }
  if (total == 0) {
    throw MetricError("no " + std::to_string(n) + "-gram exists in the responses");
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(total);
}

double recall_at_k(const std::vector<RankedEpisode>& episodes, int k) {
  if (k < 1) throw MetricError("k must be >= 1");
  if (episodes.empty()) throw MetricError("no episodes");
  std::size_t hits = 0;
  for (const RankedEpisode& e : episodes) {
    std::set<std::string> seen;
    for (const std::string& id : e.ranking) {
      if (!seen.insert(id).second) {
        throw ValidationError("duplicate id '" + id + "' in a ranking");
      }
    }
    const std::size_t limit =
        std::min<std::size_t>(static_cast<std::size_t>(k), e.ranking.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (e.ranking[i] == e.target) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(episodes.size());
}

MetricsReport compute_metrics(const std::vector<TranscriptDialogue>& corpus,
                              const MetricsConfig& config, Gateway* gateway,
                              const std::vector<RankedEpisode>* episodes) {
  MetricsReport report;
  report.tokenizer = text::kTokenizerTag;
  report.dialogues = corpus.size();
  for (const TranscriptDialogue& d : corpus) report.utterances += d.turns.size();

  for (int n : config.specificity_ns) {
    report.specificity[n] = ngram_specificity(corpus, n);
  }
  if (config.with_similarity && gateway && corpus.size() >= 2) {
    report.inter_dialogue_similarity = inter_dialogue_similarity(
        corpus, config.pair_sample_size, config.seed, *gateway);
  }
  report.avg_recommender_words = avg_recommender_words(corpus);

  std::vector<std::string> responses;
  for (const TranscriptDialogue& d : corpus) {
    for (const TranscriptTurn& t : d.turns) {
      if (!t.seeker) responses.push_back(t.text);
    }
  }
  for (int n : config.distinct_ns) {
    report.distinct_n[n] = distinct_n(responses, n);
  }

  if (episodes && !episodes->empty()) {
    for (int k : config.recall_ks) {
      report.recall_at_k[k] = recall_at_k(*episodes, k);
    }
  }
  return report;
}

std::string format_metrics_table(const MetricsReport& report) {
  std::ostringstream out;
  out << "tokenizer: " << report.tokenizer << "\n";
  out << "dialogues: " << report.dialogues
      << "  utterances: " << report.utterances;
  if (report.users > 0) out << "  users: " << report.users;
  if (report.items > 0) out << "  items: " << report.items;
  out << "\n";
  for (const auto& [n, value] : report.specificity) {
    out << n << "-gram specificity: " << value << "\n";
  }
  if (report.inter_dialogue_similarity) {
    out << "inter-dialogue similarity: " << *report.inter_dialogue_similarity
        << "\n";
  }
  out << "avg recommender words: " << report.avg_recommender_words << "\n";
  for (const auto& [n, value] : report.distinct_n) {
    out << "distinct-" << n << ": " << value << "\n";
  }
  for (const auto& [k, value] : report.recall_at_k) {
    out << "recall@" << k << ": " << value << "\n";
  }
  return out.str();
}

}  // namespace convrec
