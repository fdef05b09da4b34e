#include "convrec/gateway_remote.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "convrec/util.hpp"

namespace convrec {

namespace {

using nlohmann::json;

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string& url,
                    const std::map<std::string, std::string>& headers,
                    const std::string& body, int timeout_ms) override {
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(0, timeout_ms * 1000LL);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);
    auto result = client.Post(path, hl, body, "application/json");
    HttpResponse response;
    if (!result) {
      response.transport_ok = false;
      response.error = httplib::to_string(result.error());
      return response;
    }
    response.transport_ok = true;
    response.status = result->status;
    response.body = result->body;
    return response;
  }

 private:
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw ConfigError("endpoint URL '" + url + "' lacks a scheme");
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
  }
};

std::string read_api_key(const std::string& env_name) {
  const char* value = std::getenv(env_name.c_str());
  return value ? value : "";
}

std::map<std::string, std::string> auth_headers(const std::string& api_key) {
  std::map<std::string, std::string> headers;
  if (!api_key.empty()) headers["Authorization"] = "Bearer " + api_key;
  return headers;
}

// Connect failures, timeouts, 408/429 and 5xx are retryable; other HTTP
// errors are not.
json post_json(HttpTransport& transport, const RemoteEndpoint& endpoint,
               const std::string& api_key, const json& payload) {
  HttpResponse response = transport.post(endpoint.url, auth_headers(api_key),
                                         payload.dump(), endpoint.timeout_ms);
  if (!response.transport_ok) {
    throw TransientBackendError("transport failure: " + response.error);
  }
  if (response.status == 408 || response.status == 429 ||
      response.status >= 500) {
    throw TransientBackendError("HTTP " + std::to_string(response.status));
  }
  if (response.status < 200 || response.status >= 300) {
    throw Error("HTTP " + std::to_string(response.status) + ": " +
                response.body);
  }
  json parsed = json::parse(response.body, nullptr, false);
  if (parsed.is_discarded()) {
    throw TransientBackendError("response is not valid JSON");
  }
  return parsed;
}

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

RemoteChatBackend::RemoteChatBackend(RemoteEndpoint endpoint,
                                     std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      api_key_(read_api_key(endpoint_.api_key_env)) {}

ChatResult RemoteChatBackend::complete(const ChatRequest& request) {
  json payload;
  payload["model"] = endpoint_.model;
  payload["messages"] = json::array({
      json{{"role", "system"}, {"content", request.system_prompt}},
      json{{"role", "user"}, {"content", request.user_prompt}},
  });
  payload["temperature"] = request.temperature;
  payload["max_tokens"] = request.max_tokens;
  if (request.seed) payload["seed"] = *request.seed;

  json parsed = post_json(*transport_, endpoint_, api_key_, payload);
  ChatResult result;
  try {
    result.text =
        parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    if (parsed.contains("usage")) {
      result.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
      result.completion_tokens = parsed["usage"].value("completion_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw TransientBackendError(std::string("malformed chat response: ") +
                                e.what());
  }
  return result;
}

RemoteEmbeddingBackend::RemoteEmbeddingBackend(
    RemoteEndpoint endpoint, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      api_key_(read_api_key(endpoint_.api_key_env)) {}

EmbeddingVector RemoteEmbeddingBackend::embed(const std::string& input) {
  json payload;
  payload["model"] = endpoint_.model;
  payload["input"] = input;

  json parsed = post_json(*transport_, endpoint_, api_key_, payload);
  EmbeddingVector vec;
  vec.model_tag = tag();
  try {
    for (const json& v : parsed.at("data").at(0).at("embedding")) {
      vec.values.push_back(v.get<double>());
    }
  } catch (const json::exception& e) {
    throw TransientBackendError(std::string("malformed embedding response: ") +
                                e.what());
  }
  if (vec.values.empty()) {
    throw TransientBackendError("embedding response carried no values");
  }
  return vec;
}

RemoteNliBackend::RemoteNliBackend(RemoteEndpoint endpoint,
                                   std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      api_key_(read_api_key(endpoint_.api_key_env)) {}

NliScores RemoteNliBackend::score(const std::string& premise,
                                  const std::string& hypothesis) {
  json payload;
  if (!endpoint_.model.empty()) payload["model"] = endpoint_.model;
  payload["premise"] = premise;
  payload["hypothesis"] = hypothesis;

  json parsed = post_json(*transport_, endpoint_, api_key_, payload);
  NliScores scores;
  try {
    scores.entail = parsed.at("entailment").get<double>();
    scores.neutral = parsed.at("neutral").get<double>();
    scores.contradict = parsed.at("contradiction").get<double>();
  } catch (const json::exception& e) {
    throw TransientBackendError(std::string("malformed NLI response: ") +
                                e.what());
  }
  return scores;
}

}  // namespace convrec
