#pragma once

// Text-completion providers. The remote backend speaks
//   POST {"model": <name>, "prompt": <text>, "max_tokens": <n>}
//     -> {"text": <completion>}
// and the scripted backend answers from a substring table, for offline runs.

#include <atomic>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "kaping/concurrency.hpp"

namespace kaping {

struct CompletionRequest {
  std::string prompt;
  std::size_t max_output_tokens = 128;

  void validate() const;
};

enum class ProviderKind { remote, scripted };

struct ScriptEntry {
  std::string match;
  std::string response;
};

struct ProviderConfig {
  ProviderKind kind = ProviderKind::scripted;
  std::string endpoint;
  std::string model_name;
  double timeout_seconds = 60.0;
  std::size_t max_concurrency = 4;
  std::vector<ScriptEntry> script;  // insertion order is precedence order
  int max_retries = 3;
  double retry_base_delay_seconds = 1.0;

  void validate() const;
};

inline constexpr const char* kScriptedFallback = "UNKNOWN";

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  // Throws TransportError once retries are exhausted.
  virtual std::string generate(const CompletionRequest& request) const = 0;
  virtual std::size_t max_concurrency() const = 0;
};

class ScriptedProvider final : public CompletionProvider {
 public:
  explicit ScriptedProvider(std::vector<ScriptEntry> script,
                            std::size_t max_concurrency = 1)
      : script_(std::move(script)), max_concurrency_(max_concurrency) {}

  std::string generate(const CompletionRequest& request) const override;
  std::size_t max_concurrency() const override { return max_concurrency_; }

 private:
  std::vector<ScriptEntry> script_;
  std::size_t max_concurrency_;
};

class RemoteProvider final : public CompletionProvider {
 public:
  explicit RemoteProvider(ProviderConfig config);

  std::string generate(const CompletionRequest& request) const override;
  std::size_t max_concurrency() const override {
    return config_.max_concurrency;
  }

  const ConcurrencyGate& gate() const { return *gate_; }
  std::size_t attempts_made() const { return attempts_.load(); }

 private:
  ProviderConfig config_;
  std::unique_ptr<ConcurrencyGate> gate_;
  mutable std::atomic<std::size_t> attempts_{0};
};

std::shared_ptr<const CompletionProvider> make_provider(
    const ProviderConfig& config);

std::string generate(const ProviderConfig& config,
                     const CompletionRequest& request);

}  // namespace kaping
