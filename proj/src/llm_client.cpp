#include "kaping/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "http.hpp"
#include "json.hpp"
#include "kaping/error.hpp"

namespace kaping {

void CompletionRequest::validate() const {
  if (prompt.empty()) {
    throw Error(ErrorKind::invalid_argument, "completion prompt is empty");
  }
  if (max_output_tokens < 1) {
    throw Error(ErrorKind::invalid_argument, "max_output_tokens must be >= 1");
  }
}

void ProviderConfig::validate() const {
  if (max_concurrency < 1) {
    throw Error(ErrorKind::config, "provider.max_concurrency must be >= 1");
  }
  if (max_retries < 0) {
    throw Error(ErrorKind::config, "provider.max_retries must be >= 0");
  }
  if (kind == ProviderKind::remote) {
    if (endpoint.empty()) {
      throw Error(ErrorKind::config, "provider.endpoint is required for remote");
    }
    detail::parse_endpoint(endpoint);
    if (timeout_seconds <= 0) {
      throw Error(ErrorKind::config, "provider.timeout must be positive");
    }
  }
}

std::string ScriptedProvider::generate(const CompletionRequest& request) const {
  request.validate();
  for (const auto& entry : script_) {
    if (request.prompt.find(entry.match) != std::string::npos) {
      return entry.response;
    }
  }
  return kScriptedFallback;
}

RemoteProvider::RemoteProvider(ProviderConfig config)
    : config_(std::move(config)),
      gate_(std::make_unique<ConcurrencyGate>(config_.max_concurrency)) {
  config_.validate();
}

std::string RemoteProvider::generate(const CompletionRequest& request) const {
  request.validate();
  const auto endpoint = detail::parse_endpoint(config_.endpoint);
  nlohmann::json body = {{"model", config_.model_name},
                         {"prompt", request.prompt},
                         {"max_tokens", request.max_output_tokens}};
  const std::string payload = body.dump();
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_seconds * 1000.0));

  const int max_attempts = config_.max_retries + 1;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      const double delay =
          config_.retry_base_delay_seconds * std::pow(2.0, attempt - 2);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    ++attempts_;
    detail::HttpResult res;
    {
      ConcurrencyGate::Slot slot(*gate_);
      res = detail::post_json(endpoint, payload, timeout);
    }
    last_status = res.status;
    if (res.status == 0) {
      last_error = res.error;
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      last_error = "HTTP " + std::to_string(res.status);
      continue;
    }
    try {
      return nlohmann::json::parse(res.body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed completion response: ") + e.what();
    }
  }
  throw TransportError("completion failed after " +
                           std::to_string(max_attempts) +
                           " attempts: " + last_error,
                       last_status, max_attempts);
}

std::shared_ptr<const CompletionProvider> make_provider(
    const ProviderConfig& config) {
  config.validate();
  switch (config.kind) {
    case ProviderKind::scripted:
      return std::make_shared<ScriptedProvider>(config.script,
                                                config.max_concurrency);
    case ProviderKind::remote:
      return std::make_shared<RemoteProvider>(config);
  }
  throw Error(ErrorKind::config, "unknown provider kind");
}

std::string generate(const ProviderConfig& config,
                     const CompletionRequest& request) {
  return make_provider(config)->generate(request);
}

}  // namespace kaping
