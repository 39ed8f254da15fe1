#pragma once

// Sentence embedders for similarity retrieval. Every returned vector is
// either all zeros (no tokens) or unit L2 norm.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kaping/concurrency.hpp"

namespace kaping {

using EmbeddingVector = std::vector<double>;

enum class EmbedderKind { hashed_bow, remote };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::hashed_bow;
  std::size_t dimension = 256;
  std::string endpoint;           // remote only
  std::size_t max_concurrency = 4;  // remote only
  double timeout_seconds = 30.0;  // remote only
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const = 0;
};

// Bag of words hashed into `dimension` buckets with 64-bit FNV-1a, then
// L2-normalized. Tokens are lowercased alphanumeric runs.
class HashedBowEmbedder final : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const override;
  EmbeddingVector embed(const std::string& text) const;

 private:
  std::size_t dimension_;
};

// POST {"texts": [...]} -> {"vectors": [[...], ...]}. Vectors are
// re-normalized locally. Transport and protocol failures throw
// TransportError; a dimension mismatch throws Error(config).
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig config);
  std::size_t dimension() const override { return config_.dimension; }
  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const override;

  const ConcurrencyGate& gate() const { return *gate_; }

 private:
  EmbedderConfig config_;
  std::unique_ptr<ConcurrencyGate> gate_;
};

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config);

std::vector<EmbeddingVector> embed_batch(const EmbedderConfig& config,
                                         std::span<const std::string> texts);

// In-place L2 normalization; zero vectors stay zero.
void l2_normalize(EmbeddingVector& v);

// Cosine similarity; 0 when either side is the zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace kaping
