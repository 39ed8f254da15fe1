#include "kaping/retriever.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "kaping/text.hpp"
#include "kaping/verbalizer.hpp"

namespace kaping {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  // Largest multiple of `bound` representable, for unbiased reduction.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view stream_id) {
  return splitmix64(run_seed ^ splitmix64(fnv1a64(stream_id)));
}

std::vector<ScoredTriple> rank_candidates(const RetrievalStrategy& strategy,
                                          std::string_view question,
                                          std::span<const Triple> candidates,
                                          const KnowledgeGraph& graph) {
  std::vector<ScoredTriple> scored;
  if (candidates.empty()) return scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ScoredTriple st;
    st.triple = candidates[i];
    st.verbalized = verbalize(candidates[i], graph).text;
    st.candidate_index = i;
    scored.push_back(std::move(st));
  }

  if (const auto* sim = std::get_if<SimilarityStrategy>(&strategy)) {
    std::vector<std::string> texts;
    texts.reserve(scored.size() + 1);
    texts.emplace_back(question);
    for (const auto& st : scored) texts.push_back(st.verbalized);
    const auto vectors = sim->embedder->embed_batch(texts);
    for (std::size_t i = 0; i < scored.size(); ++i) {
      scored[i].score = cosine(vectors[0], vectors[i + 1]);
    }
  } else if (const auto* rnd = std::get_if<RandomStrategy>(&strategy)) {
    const auto perm = seeded_permutation(scored.size(), rnd->seed);
    const double n = static_cast<double>(scored.size());
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
      scored[perm[pos]].score = (n - static_cast<double>(pos)) / n;
    }
  } else {
    const auto& pop = std::get<PopularStrategy>(strategy);
    std::map<RelationId, std::size_t> local;
    const auto* freq = pop.frequency.get();
    if (!freq) {
      local = graph.relation_frequency();
      freq = &local;
    }
    for (auto& st : scored) {
      auto it = freq->find(st.triple.relation);
      st.score = it == freq->end() ? 0.0 : static_cast<double>(it->second);
    }
  }

  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredTriple& a, const ScoredTriple& b) {
                     return a.score > b.score;
                   });
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
  return scored;
}

std::vector<ScoredTriple> top_k(std::span<const ScoredTriple> ranked,
                                std::size_t k) {
  const std::size_t n = std::min(k, ranked.size());
  return std::vector<ScoredTriple>(ranked.begin(), ranked.begin() + n);
}

std::optional<std::size_t> answer_bearing(std::span<const ScoredTriple> ranked,
                                          const EntityIdSet& answers) {
  if (answers.empty()) return std::nullopt;
  for (const auto& st : ranked) {
    if (answers.count(st.triple.subject)) return st.rank;
    const EntityId* obj = st.triple.object_entity();
    if (obj && answers.count(*obj)) return st.rank;
  }
  return std::nullopt;
}

}  // namespace kaping
