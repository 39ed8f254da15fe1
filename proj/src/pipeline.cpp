#include "kaping/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "kaping/error.hpp"
#include "kaping/log.hpp"
#include "kaping/verbalizer.hpp"

namespace kaping {

using nlohmann::json;

const char* to_string(Method method) {
  switch (method) {
    case Method::no_knowledge: return "no_knowledge";
    case Method::random_knowledge: return "random_knowledge";
    case Method::popular_knowledge: return "popular_knowledge";
    case Method::generated_knowledge: return "generated_knowledge";
    case Method::kaping: return "kaping";
  }
  return "kaping";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::no_knowledge, Method::random_knowledge,
                   Method::popular_knowledge, Method::generated_knowledge,
                   Method::kaping}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

namespace {

// Typed, path-aware access to one JSON object of the config.
class ConfigObject {
 public:
  ConfigObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }

  // Rejects keys that were never looked up.
  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) fail(field(key), "unknown field");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(field(key), "wrong type");
    }
  }

  std::size_t get_count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(field(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] static void fail(const std::string& field,
                                const std::string& reason) {
    throw Error(ErrorKind::config, "config field '" + field + "': " + reason);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

PromptSpec parse_prompt(const json& j) {
  ConfigObject obj(j, "prompt");
  PromptSpec spec;
  const auto tmpl = obj.get<std::string>("question_template", "default");
  if (tmpl == "default") {
    spec.question_template = QuestionTemplate::question_answer;
  } else if (tmpl == "please") {
    spec.question_template = QuestionTemplate::please;
  } else {
    ConfigObject::fail("prompt.question_template",
                       "expected 'default' or 'please', got '" + tmpl + "'");
  }
  const auto instr = obj.get<std::string>("knowledge_instruction", "meaningful");
  if (instr == "meaningful") {
    spec.knowledge_instruction.kind = KnowledgeInstruction::Kind::meaningful;
  } else if (instr == "might_be") {
    spec.knowledge_instruction.kind = KnowledgeInstruction::Kind::might_be;
  } else if (instr == "custom") {
    spec.knowledge_instruction.kind = KnowledgeInstruction::Kind::custom;
  } else {
    ConfigObject::fail("prompt.knowledge_instruction",
                       "expected meaningful, might_be or custom");
  }
  spec.knowledge_instruction.custom_text =
      obj.get<std::string>("custom_instruction", "");
  const auto order = obj.get<std::string>("ordering", "relevant_last");
  if (order == "relevant_last") {
    spec.ordering.kind = Ordering::Kind::relevant_last;
  } else if (order == "relevant_first") {
    spec.ordering.kind = Ordering::Kind::relevant_first;
  } else if (order == "shuffled") {
    spec.ordering.kind = Ordering::Kind::shuffled;
  } else {
    ConfigObject::fail("prompt.ordering",
                       "expected relevant_last, relevant_first or shuffled");
  }
  spec.ordering.seed = obj.get<std::uint64_t>("ordering_seed", 0);
  if (obj.has("fewshot_demos")) {
    const json& demos = obj.raw("fewshot_demos");
    if (!demos.is_array()) {
      ConfigObject::fail("prompt.fewshot_demos", "expected an array");
    }
    for (std::size_t i = 0; i < demos.size(); ++i) {
      ConfigObject demo(demos[i], "prompt.fewshot_demos[" + std::to_string(i) + "]");
      spec.fewshot_demos.push_back(
          Demonstration{demo.get<std::string>("question", ""),
                        demo.get<std::string>("answer", "")});
      demo.finish();
      if (spec.fewshot_demos.back().question.empty()) {
        ConfigObject::fail(demo.field("question"), "must be non-empty");
      }
    }
  }
  spec.max_input_tokens = obj.get_count("max_input_tokens", 1024);
  spec.max_output_tokens = obj.get_count("max_output_tokens", 128);
  obj.finish();
  return spec;
}

EmbedderConfig parse_embedder(const json& j) {
  ConfigObject obj(j, "embedder");
  EmbedderConfig cfg;
  const auto kind = obj.get<std::string>("kind", "hashed_bow");
  if (kind == "hashed_bow") {
    cfg.kind = EmbedderKind::hashed_bow;
  } else if (kind == "remote") {
    cfg.kind = EmbedderKind::remote;
  } else {
    ConfigObject::fail("embedder.kind", "expected hashed_bow or remote");
  }
  cfg.dimension = obj.get_count("dimension", 256);
  cfg.endpoint = obj.get<std::string>("endpoint", "");
  cfg.max_concurrency = obj.get_count("max_concurrency", 4);
  cfg.timeout_seconds = obj.get<double>("timeout", 30.0);
  obj.finish();
  return cfg;
}

ProviderConfig parse_provider(const json& j) {
  ConfigObject obj(j, "provider");
  ProviderConfig cfg;
  const auto kind = obj.get<std::string>("kind", "scripted");
  if (kind == "scripted") {
    cfg.kind = ProviderKind::scripted;
  } else if (kind == "remote") {
    cfg.kind = ProviderKind::remote;
  } else {
    ConfigObject::fail("provider.kind", "expected scripted or remote");
  }
  cfg.endpoint = obj.get<std::string>("endpoint", "");
  cfg.model_name = obj.get<std::string>("model", "");
  cfg.timeout_seconds = obj.get<double>("timeout", 60.0);
  cfg.max_concurrency = obj.get_count("max_concurrency", 4);
  cfg.max_retries = static_cast<int>(obj.get_count("max_retries", 3));
  cfg.retry_base_delay_seconds = obj.get<double>("retry_base_delay", 1.0);
  if (obj.has("script")) {
    const json& script = obj.raw("script");
    if (!script.is_array()) ConfigObject::fail("provider.script", "expected an array");
    for (std::size_t i = 0; i < script.size(); ++i) {
      ConfigObject entry(script[i], "provider.script[" + std::to_string(i) + "]");
      ScriptEntry e{entry.get<std::string>("match", ""),
                    entry.get<std::string>("response", "")};
      if (e.match.empty()) ConfigObject::fail(entry.field("match"), "must be non-empty");
      entry.finish();
      cfg.script.push_back(std::move(e));
    }
  }
  obj.finish();
  return cfg;
}

std::string apply_template(const std::string& tmpl, const std::string& question) {
  static const std::string placeholder = "{question}";
  std::string out;
  std::size_t start = 0;
  while (true) {
    auto pos = tmpl.find(placeholder, start);
    if (pos == std::string::npos) {
      out.append(tmpl, start);
      return out;
    }
    out.append(tmpl, start, pos - start);
    out += question;
    start = pos + placeholder.size();
  }
}

std::vector<std::string> knowledge_lines(const std::string& generated) {
  std::vector<std::string> lines;
  std::istringstream in(generated);
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(first, last - first + 1));
  }
  return lines;
}

}  // namespace

void RunConfig::validate() const {
  if (hops != 1 && hops != 2) {
    ConfigObject::fail("hops", "must be 1 or 2");
  }
  prompt.validate();
  provider.validate();
  if (embedder.dimension < 1) ConfigObject::fail("embedder.dimension", "must be >= 1");
  if (embedder.max_concurrency < 1) {
    ConfigObject::fail("embedder.max_concurrency", "must be >= 1");
  }
  if (method == Method::kaping && embedder.kind == EmbedderKind::remote &&
      embedder.endpoint.empty()) {
    ConfigObject::fail("embedder.endpoint", "required for remote embedder");
  }
  if (method == Method::generated_knowledge) {
    if (generated_knowledge_template.empty()) {
      ConfigObject::fail("generated_knowledge_template",
                         "required for method generated_knowledge");
    }
    if (generated_knowledge_template.find("{question}") == std::string::npos) {
      ConfigObject::fail("generated_knowledge_template",
                         "must contain the {question} placeholder");
    }
  }
}

RunConfig RunConfig::from_json(const json& j,
                               const std::filesystem::path& base_dir) {
  ConfigObject obj(j, "");
  RunConfig cfg;
  const auto method = obj.get<std::string>("method", "kaping");
  if (auto m = parse_method(method)) {
    cfg.method = *m;
  } else {
    ConfigObject::fail("method", "unknown method '" + method + "'");
  }
  cfg.k = obj.get_count("k", 10);
  cfg.hops = static_cast<int>(obj.get_count("hops", 1));
  cfg.seed = obj.get<std::uint64_t>("seed", 0);
  if (obj.has("prompt")) cfg.prompt = parse_prompt(obj.raw("prompt"));
  if (obj.has("embedder")) cfg.embedder = parse_embedder(obj.raw("embedder"));
  if (obj.has("provider")) cfg.provider = parse_provider(obj.raw("provider"));
  cfg.generated_knowledge_template =
      obj.get<std::string>("generated_knowledge_template", "");
  if (obj.has("graph")) {
    ConfigObject graph(obj.raw("graph"), "graph");
    cfg.graph.triples = resolve(base_dir, graph.get<std::string>("triples", ""));
    cfg.graph.entities = resolve(base_dir, graph.get<std::string>("entities", ""));
    cfg.graph.relations = resolve(base_dir, graph.get<std::string>("relations", ""));
    graph.finish();
  }
  cfg.dataset = resolve(base_dir, obj.get<std::string>("dataset", ""));
  cfg.output_dir = resolve(base_dir, obj.get<std::string>("out", ""));
  obj.finish();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config,
                "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

bool ExampleRecord::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

QaExample example_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "example is not a JSON object");
  QaExample ex;
  try {
    ex.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                   : j.at("id").dump();
    ex.question = j.at("question").get<std::string>();
    if (j.contains("question_entities") && !j.at("question_entities").is_null()) {
      EntityIdSet ids;
      for (const auto& id : j.at("question_entities")) {
        ids.insert(EntityId(id.get<std::string>()));
      }
      ex.question_entities = std::move(ids);
    }
    for (const auto& id : j.at("answer_entities")) {
      ex.answer_entities.emplace_back(id.get<std::string>());
    }
    if (j.contains("category") && !j.at("category").is_null()) {
      ex.category = j.at("category").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad example: ") + e.what());
  }
  if (ex.question.empty()) throw Error(ErrorKind::parse, "example question is empty");
  return ex;
}

std::vector<QaExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open dataset " + path.string());
  std::vector<QaExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(example_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) +
                                        ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) +
                                        ": " + e.what());
    }
  }
  return out;
}

std::vector<QaExample> filter_unnamed(const std::vector<QaExample>& examples,
                                      const KnowledgeGraph& graph) {
  std::vector<QaExample> out;
  for (const auto& ex : examples) {
    bool named = std::any_of(
        ex.answer_entities.begin(), ex.answer_entities.end(),
        [&](const EntityId& id) {
          const Entity* e = graph.find_entity(id);
          return e && e->named();
        });
    if (named) out.push_back(ex);
  }
  return out;
}

AnswerSet answer_set_for(const QaExample& example, const KnowledgeGraph& graph) {
  AnswerSet answers;
  for (const auto& id : example.answer_entities) {
    const Entity* e = graph.find_entity(id);
    if (!e) continue;
    answers.entities.push_back(
        AnswerEntity{e->named() ? *e->name : std::string(), e->aliases});
  }
  return answers;
}

Runner::Runner(RunConfig config, std::shared_ptr<const KnowledgeGraph> graph,
               std::shared_ptr<const CompletionProvider> provider,
               std::shared_ptr<const Embedder> embedder)
    : config_(std::move(config)),
      graph_(std::move(graph)),
      provider_(std::move(provider)),
      embedder_(std::move(embedder)) {
  config_.validate();
  if (!graph_) throw Error(ErrorKind::invalid_argument, "runner needs a graph");
  if (!provider_) provider_ = make_provider(config_.provider);
  if (!embedder_ && config_.method == Method::kaping) {
    embedder_ = make_embedder(config_.embedder);
  }
  if (config_.method == Method::popular_knowledge) {
    frequency_ = std::make_shared<const std::map<RelationId, std::size_t>>(
        graph_->relation_frequency());
  }
}

EntityIdSet Runner::seeds_for(const QaExample& example) const {
  if (example.question_entities) return *example.question_entities;
  return graph_->link_entities(example.question);
}

RetrievalStrategy Runner::strategy_for(const QaExample& example) const {
  switch (config_.method) {
    case Method::random_knowledge:
      return RandomStrategy{derive_seed(config_.seed, example.id)};
    case Method::popular_knowledge:
      return PopularStrategy{frequency_};
    default:
      return SimilarityStrategy{embedder_};
  }
}

std::vector<ScoredTriple> Runner::rank(const QaExample& example) const {
  if (config_.method == Method::no_knowledge ||
      config_.method == Method::generated_knowledge) {
    return {};
  }
  const auto candidates = graph_->neighborhood(seeds_for(example), config_.hops);
  return rank_candidates(strategy_for(example), example.question, candidates,
                         *graph_);
}

std::string Runner::generate_or_flag(const std::string& prompt,
                                     ExampleRecord& record,
                                     const char* failure_flag) const {
  CompletionRequest request{prompt, config_.prompt.max_output_tokens};
  try {
    return provider_->generate(request);
  } catch (const TransportError& e) {
    record.flags.push_back(failure_flag);
    record.error = e.what();
    throw;
  }
}

ExampleRecord Runner::run_example(const QaExample& example) const {
  ExampleRecord record;
  record.id = example.id;
  record.question = example.question;
  record.category = example.category;
  record.method = config_.method;
  record.answer_ids = example.answer_entities;
  record.answers = answer_set_for(example, *graph_);

  const EntityIdSet seeds = seeds_for(example);
  record.question_entities.assign(seeds.begin(), seeds.end());

  PromptSpec spec = config_.prompt;
  if (spec.ordering.kind == Ordering::Kind::shuffled) {
    spec.ordering.seed = derive_seed(spec.ordering.seed, example.id);
  }

  RenderedPrompt rendered;
  try {
    switch (config_.method) {
      case Method::no_knowledge:
        rendered = render_prompt(spec, {}, example.question);
        break;

      case Method::generated_knowledge: {
        const std::string elicitation =
            apply_template(config_.generated_knowledge_template, example.question);
        try {
          record.generated_knowledge = knowledge_lines(
              generate_or_flag(elicitation, record, kFlagKnowledgeGenerationFailed));
        } catch (const TransportError&) {
          return record;
        }
        rendered = render_prompt_with_lines(spec, record.generated_knowledge,
                                            example.question);
        break;
      }

      case Method::random_knowledge:
      case Method::popular_knowledge:
      case Method::kaping: {
        std::vector<ScoredTriple> ranking;
        try {
          ranking = rank(example);
        } catch (const TransportError& e) {
          record.flags.push_back(kFlagRetrievalFailed);
          record.error = e.what();
          log::warn("retrieval failed for example " + example.id + ": " + e.what());
        }
        if (!record.has_flag(kFlagRetrievalFailed)) {
          const EntityIdSet answers(example.answer_entities.begin(),
                                    example.answer_entities.end());
          record.retrieval = score_retrieval(answer_bearing(ranking, answers));
          if (ranking.empty()) record.flags.push_back(kFlagNoCandidates);
        }
        const auto selected = top_k(ranking, config_.k);
        rendered = render_prompt(spec, selected, example.question);
        break;
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::oversize) throw;
    record.flags.push_back(kFlagPromptOversize);
    record.error = e.what();
    return record;
  }

  record.prompt = rendered.text;
  record.included_triples = std::move(rendered.included_triples);
  if (config_.method == Method::generated_knowledge) {
    record.generated_knowledge = std::move(rendered.included_lines);
  }
  if (rendered.truncated) record.flags.push_back(kFlagTruncated);

  try {
    record.generation = generate_or_flag(record.prompt, record, kFlagGenerationFailed);
  } catch (const TransportError&) {
    return record;
  }
  record.scores = score_generation(*record.generation, record.answers);
  return record;
}

std::vector<ExampleRecord> Runner::run_all(
    const std::vector<QaExample>& examples) const {
  std::vector<ExampleRecord> records(examples.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max<std::size_t>(provider_->max_concurrency(), 1),
                            examples.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      records[i] = run_example(examples[i]);
    }
    return records;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= examples.size()) return;
        try {
          records[i] = run_example(examples[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(examples.size());
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

ExampleRecord run_example(const RunConfig& config, const QaExample& example,
                          const KnowledgeGraph& graph) {
  auto shared = std::shared_ptr<const KnowledgeGraph>(&graph, [](const auto*) {});
  return Runner(config, shared).run_example(example);
}

RunSummary run(const RunConfig& config) {
  config.validate();
  if (config.graph.triples.empty()) ConfigObject::fail("graph.triples", "required");
  if (config.graph.entities.empty()) ConfigObject::fail("graph.entities", "required");
  if (config.dataset.empty()) ConfigObject::fail("dataset", "required");
  if (config.output_dir.empty()) ConfigObject::fail("out", "required");

  auto graph = std::make_shared<const KnowledgeGraph>(KnowledgeGraph::load(
      config.graph.triples, config.graph.entities, config.graph.relations));
  const auto loaded = load_dataset(config.dataset);
  const auto kept = filter_unnamed(loaded, *graph);
  if (kept.size() < loaded.size()) {
    log::warn("filtered " + std::to_string(loaded.size() - kept.size()) +
              " example(s) without a named answer entity");
  }

  Runner runner(config, graph);
  const auto records = runner.run_all(kept);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::io, "cannot create output directory " +
                                   config.output_dir.string() + ": " + ec.message());
  }
  RunSummary summary;
  summary.examples_loaded = loaded.size();
  summary.examples_kept = kept.size();
  summary.examples_path = config.output_dir / "examples.jsonl";
  summary.report_path = config.output_dir / "report.json";
  summary.report = report_for(records);

  {
    std::ofstream out(summary.examples_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + summary.examples_path.string());
    out << records_to_jsonl(records);
  }
  {
    std::ofstream out(summary.report_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + summary.report_path.string());
    out << report_json(summary.report, &config, loaded.size(), kept.size()).dump(2)
        << '\n';
  }
  return summary;
}

json record_to_json(const ExampleRecord& r) {
  json question_entities = json::array();
  for (const auto& id : r.question_entities) question_entities.push_back(id.value);
  json answers = json::array();
  for (std::size_t i = 0; i < r.answers.entities.size(); ++i) {
    const auto& a = r.answers.entities[i];
    answers.push_back({{"name", a.name}, {"aliases", a.aliases}});
  }
  json answer_ids = json::array();
  for (const auto& id : r.answer_ids) answer_ids.push_back(id.value);
  json triples = json::array();
  for (const auto& t : r.included_triples) {
    triples.push_back({{"rank", t.rank}, {"score", t.score}, {"text", t.verbalized}});
  }
  return {
      {"id", r.id},
      {"question", r.question},
      {"category", r.category ? json(*r.category) : json(nullptr)},
      {"method", to_string(r.method)},
      {"question_entities", question_entities},
      {"answer_entities", answer_ids},
      {"answers", answers},
      {"prompt", r.prompt},
      {"included_triples", triples},
      {"generated_knowledge", r.generated_knowledge},
      {"generation", r.generation ? json(*r.generation) : json(nullptr)},
      {"scores", to_json(r.scores)},
      {"retrieval", r.retrieval ? to_json(*r.retrieval) : json(nullptr)},
      {"failed", r.failed()},
      {"flags", r.flags},
      {"error", r.error ? json(*r.error) : json(nullptr)},
  };
}

ExampleRecord record_from_json(const json& j) {
  ExampleRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.question = j.value("question", std::string());
    if (j.contains("category") && !j.at("category").is_null()) {
      r.category = j.at("category").get<std::string>();
    }
    if (auto m = parse_method(j.value("method", std::string("kaping")))) r.method = *m;
    for (const auto& id : j.value("question_entities", json::array())) {
      r.question_entities.emplace_back(id.get<std::string>());
    }
    for (const auto& id : j.value("answer_entities", json::array())) {
      r.answer_ids.emplace_back(id.get<std::string>());
    }
    for (const auto& a : j.value("answers", json::array())) {
      r.answers.entities.push_back(AnswerEntity{
          a.value("name", std::string()),
          a.value("aliases", std::vector<std::string>())});
    }
    r.prompt = j.value("prompt", std::string());
    for (const auto& t : j.value("included_triples", json::array())) {
      ScoredTriple st;
      st.rank = t.at("rank").get<std::size_t>();
      st.score = t.at("score").get<double>();
      st.verbalized = t.at("text").get<std::string>();
      r.included_triples.push_back(std::move(st));
    }
    r.generated_knowledge =
        j.value("generated_knowledge", std::vector<std::string>());
    if (j.contains("generation") && !j.at("generation").is_null()) {
      r.generation = j.at("generation").get<std::string>();
    }
    if (j.contains("scores") && !j.at("scores").is_null()) {
      r.scores = gen_scores_from_json(j.at("scores"));
    }
    if (j.contains("retrieval") && !j.at("retrieval").is_null()) {
      r.retrieval = retrieval_scores_from_json(j.at("retrieval"));
    }
    r.flags = j.value("flags", std::vector<std::string>());
    if (j.contains("error") && !j.at("error").is_null()) {
      r.error = j.at("error").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad example record: ") + e.what());
  }
  return r;
}

ExampleScores example_scores(const ExampleRecord& record) {
  ExampleScores s;
  s.generation = record.scores;
  s.retrieval = record.retrieval;
  s.category = record.category;
  s.failed = record.failed();
  return s;
}

Report report_for(const std::vector<ExampleRecord>& records) {
  std::vector<ExampleScores> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(example_scores(r));
  return aggregate(scores);
}

json report_json(const Report& report, const RunConfig* config,
                 std::size_t examples_loaded, std::size_t examples_kept) {
  json j = to_json(report);
  if (config) {
    j["method"] = to_string(config->method);
    j["k"] = config->k;
    j["hops"] = config->hops;
    j["seed"] = config->seed;
    j["examples_loaded"] = examples_loaded;
    j["examples_kept"] = examples_kept;
  }
  return j;
}

std::string records_to_jsonl(const std::vector<ExampleRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ExampleRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<ExampleRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::parse,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void rescore(std::vector<ExampleRecord>& records) {
  for (auto& r : records) {
    r.scores = r.generation ? score_generation(*r.generation, r.answers) : GenScores{};
  }
}

}  // namespace kaping
