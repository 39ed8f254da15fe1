#include "kaping/embedder.hpp"

#include <chrono>
#include <cmath>

#include "http.hpp"
#include "json.hpp"
#include "kaping/error.hpp"
#include "kaping/text.hpp"

namespace kaping {

void l2_normalize(EmbeddingVector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  if (sum == 0.0) return;
  const double norm = std::sqrt(sum);
  for (double& x : v) x /= norm;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "cosine of vectors of unequal length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

HashedBowEmbedder::HashedBowEmbedder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) {
    throw Error(ErrorKind::config, "embedder dimension must be >= 1");
  }
}

EmbeddingVector HashedBowEmbedder::embed(const std::string& text) const {
  EmbeddingVector v(dimension_, 0.0);
  for (const auto& token : word_tokens(text)) {
    v[fnv1a64(token) % dimension_] += 1.0;
  }
  l2_normalize(v);
  return v;
}

std::vector<EmbeddingVector> HashedBowEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config)
    : config_(std::move(config)),
      gate_(std::make_unique<ConcurrencyGate>(config_.max_concurrency)) {
  if (config_.dimension == 0) {
    throw Error(ErrorKind::config, "embedder dimension must be >= 1");
  }
  detail::parse_endpoint(config_.endpoint);
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  nlohmann::json body;
  body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_seconds * 1000.0));

  detail::HttpResult res;
  {
    ConcurrencyGate::Slot slot(*gate_);
    res = detail::post_json(detail::parse_endpoint(config_.endpoint),
                            body.dump(), timeout);
  }
  if (res.status == 0) {
    throw TransportError("embedding request failed: " + res.error, 0, 1);
  }
  if (res.status < 200 || res.status >= 300) {
    throw TransportError(
        "embedding service returned HTTP " + std::to_string(res.status),
        res.status, 1);
  }

  std::vector<EmbeddingVector> out;
  try {
    auto parsed = nlohmann::json::parse(res.body);
    out = parsed.at("vectors").get<std::vector<EmbeddingVector>>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what(),
                         res.status, 1);
  }
  if (out.size() != texts.size()) {
    throw TransportError("embedding service returned " +
                             std::to_string(out.size()) + " vectors for " +
                             std::to_string(texts.size()) + " texts",
                         res.status, 1);
  }
  for (auto& v : out) {
    if (v.size() != config_.dimension) {
      throw Error(ErrorKind::config,
                  "embedding dimension mismatch: configured " +
                      std::to_string(config_.dimension) + ", service returned " +
                      std::to_string(v.size()));
    }
    l2_normalize(v);
  }
  return out;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config) {
  switch (config.kind) {
    case EmbedderKind::hashed_bow:
      return std::make_shared<HashedBowEmbedder>(config.dimension);
    case EmbedderKind::remote:
      return std::make_shared<RemoteEmbedder>(config);
  }
  throw Error(ErrorKind::config, "unknown embedder kind");
}

std::vector<EmbeddingVector> embed_batch(const EmbedderConfig& config,
                                         std::span<const std::string> texts) {
  return make_embedder(config)->embed_batch(texts);
}

}  // namespace kaping
