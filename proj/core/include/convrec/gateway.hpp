#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "convrec/util.hpp"

namespace convrec {

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_tag;
};

struct NliScores {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;
};

struct ChatResult {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

// Raw service providers. Implementations throw TransientBackendError for
// faults worth retrying; the Gateway owns the retry loop and rate limit.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResult complete(const ChatRequest& request) = 0;
  virtual std::string tag() const = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual EmbeddingVector embed(const std::string& input) = 0;
  virtual std::string tag() const = 0;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual NliScores score(const std::string& premise,
                          const std::string& hypothesis) = 0;
  virtual std::string tag() const = 0;
};

struct RetryPolicy {
  int attempts = 3;
  std::int64_t backoff_base_ms = 1000;
  std::int64_t backoff_cap_ms = 30000;
  bool jitter = true;
};

// Sliding-window limiter over the shared clock. rpm <= 0 disables it.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, Clock& clock)
      : rpm_(requests_per_minute), clock_(clock) {}

  void acquire();

 private:
  int rpm_;
  Clock& clock_;
  std::mutex mu_;
  std::deque<std::int64_t> window_;
};

struct GatewayUsage {
  std::uint64_t chat_requests = 0;
  std::uint64_t chat_attempts = 0;
  std::uint64_t embed_requests = 0;
  std::uint64_t nli_requests = 0;
  std::uint64_t cache_hits = 0;  // maintained by callers that memoize
  std::uint64_t truncated_inputs = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct GatewayOptions {
  RetryPolicy retry;
  int requests_per_minute = 0;
  std::size_t embed_max_chars = 32000;  // tail truncated beyond this
};

// Uniform access point for chat, embedding and NLI. One shared rate
// limiter covers all three services; everything else is request-scoped.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> chat,
          std::shared_ptr<EmbeddingBackend> embedding,
          std::shared_ptr<NliBackend> nli, GatewayOptions options,
          std::shared_ptr<Clock> clock = nullptr);

  // Non-empty completion text; retried per policy; throws TransportError
  // with the attempt log once the budget is exhausted, EmptyCompletionError
  // on a blank completion.
  std::string chat(const ChatRequest& request);

  // Deterministic for identical (input, backend). Rejects empty input;
  // over-long input is tail-truncated and counted.
  EmbeddingVector embed(const std::string& input);

  NliScores nli(const std::string& premise, const std::string& hypothesis);

  GatewayUsage usage() const;
  void count_cache_hit();

  std::string chat_tag() const { return chat_ ? chat_->tag() : "none"; }
  std::string embedding_tag() const {
    return embedding_ ? embedding_->tag() : "none";
  }
  std::string nli_tag() const { return nli_ ? nli_->tag() : "none"; }

 private:
  template <typename Fn>
  auto with_retries(const char* what, Fn&& attempt_fn);

  std::shared_ptr<ChatBackend> chat_;
  std::shared_ptr<EmbeddingBackend> embedding_;
  std::shared_ptr<NliBackend> nli_;
  GatewayOptions options_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;

  mutable std::mutex usage_mu_;
  GatewayUsage usage_;
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace convrec
