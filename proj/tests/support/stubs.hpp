#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "convrec/gateway.hpp"
#include "convrec/util.hpp"

namespace convrec::testing {

// Replays a fixed sequence of completions; repeats the last one when
// exhausted.
class SequenceChatBackend final : public ChatBackend {
 public:
  explicit SequenceChatBackend(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}

  ChatResult complete(const ChatRequest&) override {
    const std::string& reply =
        replies_[std::min(next_, replies_.size() - 1)];
    ++next_;
    return {reply, 0, 0};
  }
  std::string tag() const override { return "seq-chat"; }
  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

// Computes replies from the request; handy for protocol probes.
class FnChatBackend final : public ChatBackend {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FnChatBackend(Fn fn) : fn_(std::move(fn)) {}
  ChatResult complete(const ChatRequest& request) override {
    return {fn_(request), 0, 0};
  }
  std::string tag() const override { return "fn-chat"; }

 private:
  Fn fn_;
};

// Fails the first N attempts with a transient fault, then delegates.
template <typename Inner>
class FlakyBackend final : public ChatBackend {
 public:
  FlakyBackend(int failures, std::shared_ptr<Inner> inner)
      : failures_(failures), inner_(std::move(inner)) {}

  ChatResult complete(const ChatRequest& request) override {
    if (attempts_++ < failures_) {
      throw TransientBackendError("injected timeout");
    }
    return inner_->complete(request);
  }
  std::string tag() const override { return "flaky-chat"; }
  int attempts() const { return attempts_; }

 private:
  int failures_;
  int attempts_ = 0;
  std::shared_ptr<Inner> inner_;
};

// Scores specific (premise, hypothesis) pairs; everything else neutral.
class TableNliBackend final : public NliBackend {
 public:
  void set(const std::string& premise, const std::string& hypothesis,
           double contradiction) {
    table_[premise + "\x1f" + hypothesis] = contradiction;
  }
  NliScores score(const std::string& premise,
                  const std::string& hypothesis) override {
    auto it = table_.find(premise + "\x1f" + hypothesis);
    if (it == table_.end()) return {0.05, 0.9, 0.05};
    double c = it->second;
    return {(1.0 - c) / 2.0, (1.0 - c) / 2.0, c};
  }
  std::string tag() const override { return "table-nli"; }

 private:
  std::map<std::string, double> table_;
};

}  // namespace convrec::testing
