#include "kaping/evaluator.hpp"

#include <algorithm>
#include <unordered_map>

namespace kaping {

namespace {

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find(' ', start);
    if (end == std::string_view::npos) end = s.size();
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool contains_run(const std::vector<std::string_view>& haystack,
                  const std::vector<std::string_view>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace

std::vector<std::string> AnswerSet::surface_forms() const {
  std::vector<std::string> out;
  for (const auto& e : entities) {
    if (!e.name.empty()) out.push_back(e.name);
    for (const auto& a : e.aliases) {
      if (!a.empty()) out.push_back(a);
    }
  }
  return out;
}

double token_f1(std::string_view normalized_prediction,
                std::string_view normalized_gold) {
  const auto pred = split_spaces(normalized_prediction);
  const auto gold = split_spaces(normalized_gold);
  if (pred.empty() || gold.empty()) return 0.0;
  std::unordered_map<std::string_view, std::size_t> gold_counts;
  for (auto t : gold) ++gold_counts[t];
  std::size_t overlap = 0;
  for (auto t : pred) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision =
      static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double recall =
      static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

GenScores score_generation(std::string_view generated,
                           const AnswerSet& answers) {
  GenScores scores;
  const std::string gen = normalize_text(generated);
  const auto gen_tokens = split_spaces(gen);
  for (const auto& surface : answers.surface_forms()) {
    const std::string gold = normalize_text(surface);
    if (gold.empty()) continue;
    if (contains_run(gen_tokens, split_spaces(gold))) scores.accuracy = 1;
    if (gen == gold) scores.em = 1;
    scores.f1 = std::max(scores.f1, token_f1(gen, gold));
  }
  return scores;
}

RetrievalScores score_retrieval(std::optional<std::size_t> first_hit_rank) {
  RetrievalScores scores;
  if (first_hit_rank && *first_hit_rank == 0) first_hit_rank.reset();
  scores.first_hit_rank = first_hit_rank;
  scores.mrr =
      first_hit_rank ? 1.0 / static_cast<double>(*first_hit_rank) : 0.0;
  for (std::size_t k : kTopKCutoffs) {
    scores.top_k_hits[k] = first_hit_rank && *first_hit_rank <= k ? 1 : 0;
  }
  return scores;
}

namespace {

struct Accumulator {
  std::size_t count = 0;
  std::size_t retrieval_count = 0;
  std::size_t failures = 0;
  double accuracy = 0.0, em = 0.0, f1 = 0.0, mrr = 0.0;
  std::map<std::size_t, double> hits;

  void add(const ExampleScores& ex) {
    ++count;
    if (ex.failed) ++failures;
    accuracy += ex.generation.accuracy;
    em += ex.generation.em;
    f1 += ex.generation.f1;
    if (ex.retrieval) {
      ++retrieval_count;
      mrr += ex.retrieval->mrr;
      for (std::size_t k : kTopKCutoffs) {
        auto it = ex.retrieval->top_k_hits.find(k);
        hits[k] += it == ex.retrieval->top_k_hits.end() ? 0 : it->second;
      }
    }
  }

  MetricSummary summary() const {
    MetricSummary s;
    s.count = count;
    s.retrieval_count = retrieval_count;
    s.failures = failures;
    for (std::size_t k : kTopKCutoffs) s.top_k[k] = std::nullopt;
    if (count) {
      const double n = static_cast<double>(count);
      s.accuracy = accuracy / n;
      s.em = em / n;
      s.f1 = f1 / n;
    }
    if (retrieval_count) {
      const double n = static_cast<double>(retrieval_count);
      s.mrr = mrr / n;
      for (std::size_t k : kTopKCutoffs) {
        auto it = hits.find(k);
        s.top_k[k] = (it == hits.end() ? 0.0 : it->second) / n;
      }
    }
    return s;
  }
};

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

Report aggregate(std::span<const ExampleScores> examples) {
  Accumulator overall;
  std::map<std::string, Accumulator> groups;
  for (const auto& ex : examples) {
    overall.add(ex);
    if (ex.category) groups[*ex.category].add(ex);
  }
  Report report;
  report.overall = overall.summary();
  for (const auto& [name, acc] : groups) {
    report.by_category.emplace(name, acc.summary());
  }
  return report;
}

nlohmann::json to_json(const GenScores& scores) {
  return {{"accuracy", scores.accuracy}, {"em", scores.em}, {"f1", scores.f1}};
}

nlohmann::json to_json(const RetrievalScores& scores) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : scores.top_k_hits) hits[std::to_string(k)] = v;
  return {{"first_hit_rank", scores.first_hit_rank
                                 ? nlohmann::json(*scores.first_hit_rank)
                                 : nlohmann::json(nullptr)},
          {"mrr", scores.mrr},
          {"top_k_hits", hits}};
}

nlohmann::json to_json(const MetricSummary& s) {
  nlohmann::json top_k = nlohmann::json::object();
  for (const auto& [k, v] : s.top_k) top_k[std::to_string(k)] = optional_json(v);
  return {{"count", s.count},
          {"retrieval_count", s.retrieval_count},
          {"failures", s.failures},
          {"accuracy", optional_json(s.accuracy)},
          {"em", optional_json(s.em)},
          {"f1", optional_json(s.f1)},
          {"mrr", optional_json(s.mrr)},
          {"top_k", top_k}};
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json by_category = nlohmann::json::object();
  for (const auto& [name, s] : report.by_category) by_category[name] = to_json(s);
  return {{"overall", to_json(report.overall)}, {"by_category", by_category}};
}

GenScores gen_scores_from_json(const nlohmann::json& j) {
  GenScores s;
  s.accuracy = j.at("accuracy").get<int>();
  s.em = j.at("em").get<int>();
  s.f1 = j.at("f1").get<double>();
  return s;
}

RetrievalScores retrieval_scores_from_json(const nlohmann::json& j) {
  const auto& rank = j.at("first_hit_rank");
  return score_retrieval(rank.is_null()
                             ? std::nullopt
                             : std::optional<std::size_t>(rank.get<std::size_t>()));
}

}  // namespace kaping
