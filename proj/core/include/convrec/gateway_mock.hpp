#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "convrec/gateway.hpp"

namespace convrec {

// Offline chat provider. Pure function of (request text, seed): it parses
// the default prompt layouts and plays a cooperative seeker/recommender,
// echoes scripted replies for exact user-prompt matches, and can inject
// protocol defects into a deterministic share of sessions for filter
// calibration runs.
struct MockChatOptions {
  std::map<std::string, std::string> script;
  // 0 disables injection; N makes every session whose seed % N == 0
  // defective, with the defect kind cycling through the five filter rules.
  int adversarial_period = 0;
};

class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(MockChatOptions options = {})
      : options_(std::move(options)) {}

  ChatResult complete(const ChatRequest& request) override;
  std::string tag() const override { return "mock-chat"; }

 private:
  MockChatOptions options_;
};

// Seeded pseudo-random unit vector per token, occurrences summed, result
// renormalized; lexically similar texts get similar vectors.
class MockEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit MockEmbeddingBackend(int dim = 64, std::uint64_t seed = 0x5eed)
      : dim_(dim), seed_(seed) {}

  EmbeddingVector embed(const std::string& input) override;
  std::string tag() const override {
    return "mock-embed-" + std::to_string(dim_);
  }

 private:
  int dim_;
  std::uint64_t seed_;
};

// Rule-based scorer: a hypothesis that restates one of the premise's
// liked/disliked features with flipped polarity scores contradiction 0.9;
// an exact restatement scores entailment 0.9; anything else neutral 0.9.
class MockNliBackend final : public NliBackend {
 public:
  NliScores score(const std::string& premise,
                  const std::string& hypothesis) override;
  std::string tag() const override { return "mock-nli"; }
};

// Defect kinds cycled by the adversarial mock, exposed for tests.
enum class MockDefect {
  kNone,
  kRepetition,
  kTargetLeak,
  kWrongAcceptance,
  kPersonaContradiction,
  kGuessContradiction,
};

MockDefect mock_defect_for_seed(std::uint64_t seed, int adversarial_period);

}  // namespace convrec
