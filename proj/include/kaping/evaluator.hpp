#pragma once

// Answer and retrieval metrics.
//
// Generation: accuracy is token-level containment of any answer name or
// alias in the normalized generation; EM and F1 follow the extractive-QA
// convention over normalized tokens (no article stripping).
// Retrieval: reciprocal rank and Top-{1,10,30} hits of the first
// answer-bearing triple.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kaping/text.hpp"

namespace kaping {

struct AnswerEntity {
  std::string name;
  std::vector<std::string> aliases;
};

struct AnswerSet {
  std::vector<AnswerEntity> entities;

  // Names followed by aliases, per entity, skipping empty strings.
  std::vector<std::string> surface_forms() const;
};

struct GenScores {
  int accuracy = 0;
  int em = 0;
  double f1 = 0.0;
};

inline constexpr std::array<std::size_t, 3> kTopKCutoffs = {1, 10, 30};

struct RetrievalScores {
  std::optional<std::size_t> first_hit_rank;
  double mrr = 0.0;
  std::map<std::size_t, int> top_k_hits;  // keyed by kTopKCutoffs
};

GenScores score_generation(std::string_view generated, const AnswerSet& answers);

// Token F1 between two already-normalized strings; 0 if either is empty.
double token_f1(std::string_view normalized_prediction,
                std::string_view normalized_gold);

RetrievalScores score_retrieval(std::optional<std::size_t> first_hit_rank);

struct ExampleScores {
  GenScores generation;
  std::optional<RetrievalScores> retrieval;
  std::optional<std::string> category;
  bool failed = false;
};

struct MetricSummary {
  std::size_t count = 0;
  std::size_t retrieval_count = 0;
  std::size_t failures = 0;
  std::optional<double> accuracy;
  std::optional<double> em;
  std::optional<double> f1;
  std::optional<double> mrr;
  std::map<std::size_t, std::optional<double>> top_k;
};

struct Report {
  MetricSummary overall;
  std::map<std::string, MetricSummary> by_category;  // lexicographic
};

// Means over all examples; retrieval means over examples that carry
// retrieval scores. Metrics with no contributing example stay absent.
// Examples without a category only count toward `overall`.
Report aggregate(std::span<const ExampleScores> examples);

nlohmann::json to_json(const GenScores& scores);
nlohmann::json to_json(const RetrievalScores& scores);
nlohmann::json to_json(const MetricSummary& summary);
nlohmann::json to_json(const Report& report);

GenScores gen_scores_from_json(const nlohmann::json& j);
RetrievalScores retrieval_scores_from_json(const nlohmann::json& j);

}  // namespace kaping
