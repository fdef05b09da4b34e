#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace convrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Structured text that does not match the expected format.
class ParseError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

// A completion that could not be turned into a valid abstract.
class AbstractionError : public Error {
 public:
  using Error::Error;
};

class SimulatorError : public Error {
 public:
  using Error::Error;
};

// Recommendation of a title outside the candidate set.
class OffCandidateError : public SimulatorError {
 public:
  using SimulatorError::SimulatorError;
};

class IneligibleUserError : public Error {
 public:
  using Error::Error;
};

// Thrown by backends for faults that are worth retrying (timeouts, 429, 5xx).
class TransientBackendError : public Error {
 public:
  using Error::Error;
};

class EmptyCompletionError : public Error {
 public:
  using Error::Error;
};

// Raised once the retry budget is exhausted; carries the per-attempt log.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, std::vector<std::string> attempts)
      : Error(message), attempts_(std::move(attempts)) {}
  explicit TransportError(const std::string& message) : Error(message) {}
  const std::vector<std::string>& attempts() const { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

// FNV-1a, used wherever a hash must be stable across platforms and runs.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a_mix(std::uint64_t value, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (i * 8)) & 0xffULL;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t value);

// splitmix64. Deterministic across platforms, unlike the std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double gaussian() {
    double u1 = unit();
    double u2 = unit();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

// Time source seam so rate limiting and backoff are testable with a
// virtual clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_ms(std::int64_t duration_ms) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override {
    auto now = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  }
  void sleep_ms(std::int64_t duration_ms) override {
    if (duration_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(duration_ms));
    }
  }
};

// Advances instantly on sleep and records every pause.
class VirtualClock final : public Clock {
 public:
  std::int64_t now_ms() override {
    std::lock_guard<std::mutex> lock(mu_);
    return now_;
  }
  void sleep_ms(std::int64_t duration_ms) override {
    std::lock_guard<std::mutex> lock(mu_);
    if (duration_ms > 0) {
      now_ += duration_ms;
      sleeps_.push_back(duration_ms);
    }
  }
  std::vector<std::int64_t> sleeps() const {
    std::lock_guard<std::mutex> lock(mu_);
    return sleeps_;
  }

 private:
  mutable std::mutex mu_;
  std::int64_t now_ = 0;
  std::vector<std::int64_t> sleeps_;
};

// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
// rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace convrec
