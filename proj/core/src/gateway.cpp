#include "convrec/gateway.hpp"

#include <cmath>

#include "convrec/text.hpp"

namespace convrec {

namespace {
constexpr std::int64_t kWindowMs = 60000;
}

void RateLimiter::acquire() {
  if (rpm_ <= 0) return;
  while (true) {
    std::int64_t wait_ms = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      std::int64_t now = clock_.now_ms();
      while (!window_.empty() && window_.front() <= now - kWindowMs) {
        window_.pop_front();
      }
      if (window_.size() < static_cast<std::size_t>(rpm_)) {
        window_.push_back(now);
        return;
      }
      wait_ms = window_.front() + kWindowMs - now;
    }
    clock_.sleep_ms(wait_ms > 0 ? wait_ms : 1);
  }
}

Gateway::Gateway(std::shared_ptr<ChatBackend> chat,
                 std::shared_ptr<EmbeddingBackend> embedding,
                 std::shared_ptr<NliBackend> nli, GatewayOptions options,
                 std::shared_ptr<Clock> clock)
    : chat_(std::move(chat)),
      embedding_(std::move(embedding)),
      nli_(std::move(nli)),
      options_(options),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      limiter_(options.requests_per_minute, *clock_) {}

template <typename Fn>
auto Gateway::with_retries(const char* what, Fn&& attempt_fn) {
  const RetryPolicy& policy = options_.retry;
  std::vector<std::string> attempt_log;
  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    try {
      return attempt_fn(attempt);
    } catch (const TransientBackendError& e) {
      attempt_log.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
      if (attempt >= policy.attempts) {
        throw TransportError(std::string(what) + " failed after " +
                                 std::to_string(attempt) + " attempts",
                             std::move(attempt_log));
      }
      std::int64_t delay = policy.backoff_base_ms;
      for (int i = 1; i < attempt; ++i) delay *= 2;
      if (delay > policy.backoff_cap_ms) delay = policy.backoff_cap_ms;
      if (policy.jitter) {
        // Deterministic jitter derived from the attempt log so virtual-clock
        // tests stay reproducible.
        Rng rng(fnv1a(attempt_log.back()) ^ static_cast<std::uint64_t>(attempt));
        delay += static_cast<std::int64_t>(rng.unit() * 0.5 * static_cast<double>(delay));
      }
      clock_->sleep_ms(delay);
    }
  }
}

std::string Gateway::chat(const ChatRequest& request) {
  if (!chat_) throw ConfigError("no chat backend configured");
  if (request.system_prompt.empty() || request.user_prompt.empty()) {
    throw PreconditionError("chat prompts must be non-empty");
  }
  if (!std::isfinite(request.temperature) || request.temperature < 0.0) {
    throw PreconditionError("temperature must be finite and >= 0");
  }
  {
    std::lock_guard<std::mutex> lock(usage_mu_);
    ++usage_.chat_requests;
  }
  ChatResult result = with_retries("chat", [&](int) {
    {
      std::lock_guard<std::mutex> lock(usage_mu_);
      ++usage_.chat_attempts;
    }
    return chat_->complete(request);
  });
  {
    std::lock_guard<std::mutex> lock(usage_mu_);
    usage_.prompt_tokens += result.prompt_tokens;
    usage_.completion_tokens += result.completion_tokens;
  }
  std::string completion = text::trim(result.text);
  if (completion.empty()) {
    throw EmptyCompletionError("backend returned an empty completion");
  }
  return completion;
}

EmbeddingVector Gateway::embed(const std::string& input) {
  if (!embedding_) throw ConfigError("no embedding backend configured");
  if (input.empty()) {
    throw PreconditionError("embedding input must be non-empty");
  }
  std::string payload = input;
  if (payload.size() > options_.embed_max_chars) {
    payload.resize(options_.embed_max_chars);
    std::lock_guard<std::mutex> lock(usage_mu_);
    ++usage_.truncated_inputs;
  }
  {
    std::lock_guard<std::mutex> lock(usage_mu_);
    ++usage_.embed_requests;
  }
  return with_retries("embed", [&](int) { return embedding_->embed(payload); });
}

NliScores Gateway::nli(const std::string& premise, const std::string& hypothesis) {
  if (!nli_) throw ConfigError("no NLI backend configured");
  if (premise.empty() || hypothesis.empty()) {
    throw PreconditionError("NLI premise and hypothesis must be non-empty");
  }
  {
    std::lock_guard<std::mutex> lock(usage_mu_);
    ++usage_.nli_requests;
  }
  return with_retries("nli", [&](int) { return nli_->score(premise, hypothesis); });
}

GatewayUsage Gateway::usage() const {
  std::lock_guard<std::mutex> lock(usage_mu_);
  return usage_;
}

void Gateway::count_cache_hit() {
  std::lock_guard<std::mutex> lock(usage_mu_);
  ++usage_.cache_hits;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw ValidationError("embedding dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace convrec
