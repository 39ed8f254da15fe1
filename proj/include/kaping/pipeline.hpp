#pragma once

// End-to-end runs: load graph and dataset, build a prompt per example under
// the configured method, query the provider, score, and persist
//   <out>/examples.jsonl   one record per example, dataset order
//   <out>/report.json      aggregate metrics
//
// Dataset JSONL, one object per line:
//   {"id": ..., "question": ..., "question_entities": [...],
//    "answer_entities": [...], "category": ...}
// question_entities and category are optional.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kaping/embedder.hpp"
#include "kaping/evaluator.hpp"
#include "kaping/kg_store.hpp"
#include "kaping/llm_client.hpp"
#include "kaping/prompt_builder.hpp"
#include "kaping/retriever.hpp"

namespace kaping {

enum class Method {
  no_knowledge,
  random_knowledge,
  popular_knowledge,
  generated_knowledge,
  kaping,
};

const char* to_string(Method method);
std::optional<Method> parse_method(std::string_view s);

struct QaExample {
  std::string id;
  std::string question;
  std::optional<EntityIdSet> question_entities;  // linked when absent
  std::vector<EntityId> answer_entities;
  std::optional<std::string> category;
};

struct GraphPaths {
  std::filesystem::path triples;
  std::filesystem::path entities;
  std::filesystem::path relations;  // optional
};

struct RunConfig {
  Method method = Method::kaping;
  std::size_t k = 10;
  int hops = 1;
  std::uint64_t seed = 0;
  PromptSpec prompt;
  EmbedderConfig embedder;
  ProviderConfig provider;
  // Elicitation prompt for generated_knowledge; "{question}" is replaced by
  // the question text.
  std::string generated_knowledge_template;
  GraphPaths graph;
  std::filesystem::path dataset;
  std::filesystem::path output_dir;

  // Throws Error(config) naming the offending field.
  void validate() const;

  // Relative paths resolve against `base_dir`. Unknown fields are rejected.
  static RunConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir = {});
  static RunConfig from_file(const std::filesystem::path& path);
};

struct ExampleRecord {
  std::string id;
  std::string question;
  std::optional<std::string> category;
  Method method = Method::no_knowledge;
  std::vector<EntityId> question_entities;
  std::vector<EntityId> answer_ids;
  AnswerSet answers;
  std::string prompt;
  std::vector<ScoredTriple> included_triples;
  std::vector<std::string> generated_knowledge;
  std::optional<std::string> generation;
  GenScores scores;
  std::optional<RetrievalScores> retrieval;
  std::vector<std::string> flags;
  std::optional<std::string> error;

  bool failed() const { return !generation.has_value(); }
  bool has_flag(std::string_view flag) const;
};

// Record flags.
inline constexpr const char* kFlagNoCandidates = "no_candidates";
inline constexpr const char* kFlagTruncated = "truncated";
inline constexpr const char* kFlagRetrievalFailed = "retrieval_failed";
inline constexpr const char* kFlagGenerationFailed = "generation_failed";
inline constexpr const char* kFlagKnowledgeGenerationFailed =
    "knowledge_generation_failed";
inline constexpr const char* kFlagPromptOversize = "prompt_oversize";

std::vector<QaExample> load_dataset(const std::filesystem::path& path);
QaExample example_from_json(const nlohmann::json& j);

// Keeps examples with at least one named answer entity, in order.
std::vector<QaExample> filter_unnamed(const std::vector<QaExample>& examples,
                                      const KnowledgeGraph& graph);

// Names and aliases of the example's answer entities; unknown ids skipped.
AnswerSet answer_set_for(const QaExample& example, const KnowledgeGraph& graph);

// Shared per-run state: graph, provider and embedder built once.
class Runner {
 public:
  Runner(RunConfig config, std::shared_ptr<const KnowledgeGraph> graph,
         std::shared_ptr<const CompletionProvider> provider = nullptr,
         std::shared_ptr<const Embedder> embedder = nullptr);

  const RunConfig& config() const { return config_; }
  const KnowledgeGraph& graph() const { return *graph_; }

  // Full ranking of the example's candidate triples under the configured
  // retrieval method. Empty for no_knowledge / generated_knowledge.
  std::vector<ScoredTriple> rank(const QaExample& example) const;

  ExampleRecord run_example(const QaExample& example) const;

  // Runs every example on a pool bounded by the provider's concurrency;
  // records come back in input order.
  std::vector<ExampleRecord> run_all(const std::vector<QaExample>& examples) const;

 private:
  EntityIdSet seeds_for(const QaExample& example) const;
  RetrievalStrategy strategy_for(const QaExample& example) const;
  std::string generate_or_flag(const std::string& prompt, ExampleRecord& record,
                               const char* failure_flag) const;

  RunConfig config_;
  std::shared_ptr<const KnowledgeGraph> graph_;
  std::shared_ptr<const CompletionProvider> provider_;
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const std::map<RelationId, std::size_t>> frequency_;
};

ExampleRecord run_example(const RunConfig& config, const QaExample& example,
                          const KnowledgeGraph& graph);

struct RunSummary {
  Report report;
  std::size_t examples_loaded = 0;
  std::size_t examples_kept = 0;
  std::filesystem::path examples_path;
  std::filesystem::path report_path;
};

// Loads inputs, runs, writes outputs. Load and config problems throw;
// per-example failures are recorded and do not abort the run.
RunSummary run(const RunConfig& config);

nlohmann::json record_to_json(const ExampleRecord& record);
ExampleRecord record_from_json(const nlohmann::json& j);

ExampleScores example_scores(const ExampleRecord& record);
Report report_for(const std::vector<ExampleRecord>& records);
nlohmann::json report_json(const Report& report, const RunConfig* config,
                           std::size_t examples_loaded,
                           std::size_t examples_kept);

// Per-example JSONL: one compact JSON object per line.
std::string records_to_jsonl(const std::vector<ExampleRecord>& records);
std::vector<ExampleRecord> read_records(const std::filesystem::path& path);

// Recomputes generation scores of existing records against their stored
// answers.
void rescore(std::vector<ExampleRecord>& records);

}  // namespace kaping
