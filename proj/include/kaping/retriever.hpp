#pragma once

// Candidate ranking for knowledge injection: similarity (embedding cosine),
// seeded random and relation-popularity strategies. Ties always resolve by
// candidate position, so every ranking is deterministic.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kaping/embedder.hpp"
#include "kaping/kg_store.hpp"

namespace kaping {

struct ScoredTriple {
  Triple triple;
  std::string verbalized;
  double score = 0.0;
  std::size_t rank = 0;             // 1-based
  std::size_t candidate_index = 0;  // position in the candidate list
};

struct SimilarityStrategy {
  std::shared_ptr<const Embedder> embedder;
};

struct RandomStrategy {
  std::uint64_t seed = 0;
};

struct PopularStrategy {
  // Whole-graph relation counts; computed on demand when null.
  std::shared_ptr<const std::map<RelationId, std::size_t>> frequency;
};

using RetrievalStrategy =
    std::variant<SimilarityStrategy, RandomStrategy, PopularStrategy>;

// Scores every candidate and sorts by score descending, ties by candidate
// index ascending. Embedder failures propagate.
std::vector<ScoredTriple> rank_candidates(const RetrievalStrategy& strategy,
                                          std::string_view question,
                                          std::span<const Triple> candidates,
                                          const KnowledgeGraph& graph);

std::vector<ScoredTriple> top_k(std::span<const ScoredTriple> ranked,
                                std::size_t k);

// Rank of the first triple whose subject or entity object is an answer.
std::optional<std::size_t> answer_bearing(std::span<const ScoredTriple> ranked,
                                          const EntityIdSet& answers);

// Uniform permutation of [0, n) from a 64-bit seed. Fisher-Yates over
// mt19937_64 with rejection sampling, so the result is identical across
// standard libraries.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Per-question seed sub-stream: mixes the run seed with FNV-1a of the id.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view stream_id);

}  // namespace kaping
