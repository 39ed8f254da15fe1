#include "kaping/kaping.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "json.hpp"
#include "kaping/error.hpp"
#include "kaping/log.hpp"
#include "kaping/pipeline.hpp"
#include "kaping/verbalizer.hpp"

struct kaping_graph {
  std::shared_ptr<const kaping::KnowledgeGraph> graph;
};

namespace {

thread_local std::string g_last_error;

kaping_status status_for(kaping::ErrorKind kind) {
  using kaping::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return KAPING_ERR_INVALID_ARGUMENT;
    case ErrorKind::io: return KAPING_ERR_IO;
    case ErrorKind::parse: return KAPING_ERR_PARSE;
    case ErrorKind::dangling_reference: return KAPING_ERR_DANGLING_REFERENCE;
    case ErrorKind::config: return KAPING_ERR_CONFIG;
    case ErrorKind::transport: return KAPING_ERR_TRANSPORT;
    case ErrorKind::oversize: return KAPING_ERR_OVERSIZE;
  }
  return KAPING_ERR_INTERNAL;
}

kaping_status fail(kaping_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
kaping_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return KAPING_OK;
  } catch (const kaping::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(KAPING_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KAPING_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KAPING_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KAPING_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void require(const void* p, const char* name) {
  if (!p) {
    throw kaping::Error(kaping::ErrorKind::invalid_argument,
                        std::string(name) + " must not be NULL");
  }
}

kaping::RunConfig parse_config(const char* config_json, const char* base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw kaping::Error(kaping::ErrorKind::config,
                        std::string("config is not valid JSON: ") + e.what());
  }
  return kaping::RunConfig::from_json(j, base_dir ? base_dir : "");
}

}  // namespace

extern "C" {

const char* kaping_version(void) { return "0.1.0"; }

const char* kaping_status_string(kaping_status status) {
  switch (status) {
    case KAPING_OK: return "ok";
    case KAPING_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KAPING_ERR_IO: return "i/o error";
    case KAPING_ERR_PARSE: return "parse error";
    case KAPING_ERR_DANGLING_REFERENCE: return "dangling reference";
    case KAPING_ERR_CONFIG: return "config error";
    case KAPING_ERR_TRANSPORT: return "transport error";
    case KAPING_ERR_OVERSIZE: return "prompt oversize";
    case KAPING_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kaping_last_error(void) { return g_last_error.c_str(); }

void kaping_string_free(char* s) { std::free(s); }

void kaping_set_logging(int enabled) { kaping::log::set_enabled(enabled != 0); }

kaping_status kaping_graph_load(const char* triples_path,
                                const char* entities_path,
                                const char* relations_path,
                                kaping_graph** out) {
  return guarded([&] {
    require(triples_path, "triples_path");
    require(entities_path, "entities_path");
    require(out, "out");
    *out = nullptr;
    auto graph = kaping::KnowledgeGraph::load(
        triples_path, entities_path, relations_path ? relations_path : "");
    *out = new kaping_graph{
        std::make_shared<const kaping::KnowledgeGraph>(std::move(graph))};
  });
}

kaping_status kaping_graph_load_from_config(const char* config_json,
                                            const char* base_dir,
                                            kaping_graph** out) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out, "out");
    *out = nullptr;
    const auto cfg = parse_config(config_json, base_dir);
    if (cfg.graph.triples.empty() || cfg.graph.entities.empty()) {
      throw kaping::Error(kaping::ErrorKind::config,
                          "config field 'graph': triples and entities required");
    }
    auto graph = kaping::KnowledgeGraph::load(
        cfg.graph.triples, cfg.graph.entities, cfg.graph.relations);
    *out = new kaping_graph{
        std::make_shared<const kaping::KnowledgeGraph>(std::move(graph))};
  });
}

void kaping_graph_free(kaping_graph* graph) { delete graph; }

kaping_status kaping_graph_stats(const kaping_graph* graph, size_t* entities,
                                 size_t* relations, size_t* triples) {
  return guarded([&] {
    require(graph, "graph");
    if (entities) *entities = graph->graph->entity_count();
    if (relations) *relations = graph->graph->relation_count();
    if (triples) *triples = graph->graph->triples().size();
  });
}

kaping_status kaping_retrieve(const kaping_graph* graph, const char* config_json,
                              const char* question, const char* entity_ids,
                              size_t k, char** out_json) {
  return guarded([&] {
    require(graph, "graph");
    require(question, "question");
    require(out_json, "out_json");
    *out_json = nullptr;
    if (!*question) {
      throw kaping::Error(kaping::ErrorKind::invalid_argument,
                          "question must be non-empty");
    }
    kaping::RunConfig cfg =
        config_json && *config_json ? parse_config(config_json, nullptr)
                                    : kaping::RunConfig{};
    if (cfg.method == kaping::Method::no_knowledge ||
        cfg.method == kaping::Method::generated_knowledge) {
      cfg.method = kaping::Method::kaping;
    }
    kaping::QaExample example;
    example.id = question;
    example.question = question;
    if (entity_ids && *entity_ids) {
      kaping::EntityIdSet ids;
      std::string list = entity_ids;
      std::size_t start = 0;
      while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string::npos) end = list.size();
        if (end > start) ids.insert(kaping::EntityId(list.substr(start, end - start)));
        start = end + 1;
      }
      example.question_entities = std::move(ids);
    }
    kaping::Runner runner(cfg, graph->graph,
                          std::make_shared<kaping::ScriptedProvider>(
                              std::vector<kaping::ScriptEntry>{}));
    const auto ranking = runner.rank(example);
    const auto selected = kaping::top_k(ranking, k);

    nlohmann::json seeds = nlohmann::json::array();
    const kaping::EntityIdSet linked =
        example.question_entities ? *example.question_entities
                                  : graph->graph->link_entities(question);
    for (const auto& id : linked) seeds.push_back(id.value);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& st : selected) {
      rows.push_back({{"rank", st.rank}, {"score", st.score}, {"text", st.verbalized}});
    }
    nlohmann::json result = {{"question", question},
                             {"method", kaping::to_string(cfg.method)},
                             {"hops", cfg.hops},
                             {"question_entities", seeds},
                             {"candidates", ranking.size()},
                             {"ranking", rows}};
    *out_json = dup_string(result.dump(2));
  });
}

kaping_status kaping_run(const char* config_json, const char* base_dir,
                         char** out_report_json) {
  return guarded([&] {
    require(config_json, "config_json");
    if (out_report_json) *out_report_json = nullptr;
    const auto cfg = parse_config(config_json, base_dir);
    const auto summary = kaping::run(cfg);
    if (out_report_json) {
      *out_report_json = dup_string(
          kaping::report_json(summary.report, &cfg, summary.examples_loaded,
                              summary.examples_kept)
              .dump(2));
    }
  });
}

kaping_status kaping_score_jsonl(const char* examples_path, char** out_jsonl) {
  return guarded([&] {
    require(examples_path, "examples_path");
    require(out_jsonl, "out_jsonl");
    *out_jsonl = nullptr;
    auto records = kaping::read_records(examples_path);
    kaping::rescore(records);
    *out_jsonl = dup_string(kaping::records_to_jsonl(records));
  });
}

kaping_status kaping_report_jsonl(const char* examples_path,
                                  char** out_report_json) {
  return guarded([&] {
    require(examples_path, "examples_path");
    require(out_report_json, "out_report_json");
    *out_report_json = nullptr;
    const auto records = kaping::read_records(examples_path);
    *out_report_json = dup_string(
        kaping::report_json(kaping::report_for(records), nullptr, 0, 0).dump(2));
  });
}

kaping_status kaping_graph_verbalize(const kaping_graph* graph, char** out_text) {
  return guarded([&] {
    require(graph, "graph");
    require(out_text, "out_text");
    *out_text = nullptr;
    std::string text;
    for (const auto& t : graph->graph->triples()) {
      text += kaping::verbalize(t, *graph->graph).text;
      text += '\n';
    }
    *out_text = dup_string(text);
  });
}

}  // extern "C"
