#pragma once

#include <map>
#include <memory>
#include <string>

#include "convrec/gateway.hpp"

namespace convrec {

struct HttpResponse {
  bool transport_ok = false;  // false: connect/timeout level failure
  int status = 0;
  std::string body;
  std::string error;
};

// Seam between the wire-schema code and the socket layer; fault-injection
// tests swap in a scripted transport.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url,
                            const std::map<std::string, std::string>& headers,
                            const std::string& body, int timeout_ms) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();

struct RemoteEndpoint {
  std::string url;        // full endpoint URL
  std::string model;      // model tag sent in the payload
  std::string api_key_env = "CONVREC_API_KEY";
  int timeout_ms = 60000;
};

// Chat-completion wire schema: messages[{role,content}] in,
// choices[0].message.content out.
class RemoteChatBackend final : public ChatBackend {
 public:
  RemoteChatBackend(RemoteEndpoint endpoint,
                    std::shared_ptr<HttpTransport> transport);
  ChatResult complete(const ChatRequest& request) override;
  std::string tag() const override { return "remote-chat:" + endpoint_.model; }

 private:
  RemoteEndpoint endpoint_;
  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
};

// Embedding wire schema: {model, input} in, data[0].embedding out.
class RemoteEmbeddingBackend final : public EmbeddingBackend {
 public:
  RemoteEmbeddingBackend(RemoteEndpoint endpoint,
                         std::shared_ptr<HttpTransport> transport);
  EmbeddingVector embed(const std::string& input) override;
  std::string tag() const override {
    return "remote-embed:" + endpoint_.model;
  }

 private:
  RemoteEndpoint endpoint_;
  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
};

// Scoring service schema: {premise, hypothesis} in,
// {entailment, neutral, contradiction} out.
class RemoteNliBackend final : public NliBackend {
 public:
  RemoteNliBackend(RemoteEndpoint endpoint,
                   std::shared_ptr<HttpTransport> transport);
  NliScores score(const std::string& premise,
                  const std::string& hypothesis) override;
  std::string tag() const override { return "remote-nli:" + endpoint_.model; }

 private:
  RemoteEndpoint endpoint_;
  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
};

}  // namespace convrec
