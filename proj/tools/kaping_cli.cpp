// kaping command-line front end. Talks to the library only through the C API.
//
//   kaping run --config cfg.json [--method M] [--k N] [--hops H] [--order O]
//              [--template T] [--seed S] [--out DIR] [--set field=value]...
//   kaping score --examples examples.jsonl [--out rescored.jsonl]
//   kaping retrieve --config cfg.json --question TEXT --k N [--entities Q1,Q2]
//   kaping report --in examples.jsonl [--out report.json]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kaping/kaping.h"

namespace {

using nlohmann::json;

struct CString {
  char* p = nullptr;
  ~CString() { kaping_string_free(p); }
};

int report_failure(kaping_status status) {
  std::cerr << "kaping: " << kaping_status_string(status) << ": "
            << kaping_last_error() << '\n';
  return 1;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "kaping: cannot write " << path << '\n';
    return false;
  }
  out << text;
  return true;
}

// Applies "a.b.c=value" to the config; value is parsed as JSON when it can
// be, otherwise taken as a string.
void set_field(json& config, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw CLI::ValidationError("--set", "expected field=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    auto dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

struct ConfigSource {
  json config;
  std::string base_dir;
};

std::optional<ConfigSource> load_config(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "kaping: cannot read config " << path << '\n';
    return std::nullopt;
  }
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    std::cerr << "kaping: config " << path << " is not a JSON object\n";
    return std::nullopt;
  }
  std::string base = std::filesystem::path(path).parent_path().string();
  return ConfigSource{std::move(j), base};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-augmented prompting over a knowledge graph"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  // run
  auto* run = app.add_subcommand("run", "Run a configured method over a dataset");
  std::string run_config;
  std::optional<std::string> method, order, question_template, out_dir;
  std::optional<std::size_t> k;
  std::optional<int> hops;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> assignments;
  run->add_option("--config", run_config, "Run config JSON")->required();
  run->add_option("--method", method, "no_knowledge|random_knowledge|popular_knowledge|generated_knowledge|kaping");
  run->add_option("--k", k, "Number of injected triples");
  run->add_option("--hops", hops, "Neighborhood hops (1 or 2)");
  run->add_option("--order", order, "relevant_last|relevant_first|shuffled");
  run->add_option("--template", question_template, "default|please");
  run->add_option("--seed", seed, "Run seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--set", assignments, "Override any config field: a.b=value");

  // score
  auto* score = app.add_subcommand("score", "Re-score generations in a per-example JSONL");
  std::string score_in, score_out;
  score->add_option("--examples", score_in, "Per-example JSONL")->required();
  score->add_option("--out", score_out, "Output JSONL (default stdout)");

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Rank triples for a single question");
  std::string retrieve_config, question, entities;
  std::size_t retrieve_k = 10;
  retrieve->add_option("--config", retrieve_config, "Run config JSON")->required();
  retrieve->add_option("--question", question, "Question text")->required();
  retrieve->add_option("--k", retrieve_k, "Number of triples to show");
  retrieve->add_option("--entities", entities, "Comma-separated seed entity ids");

  // report
  auto* report = app.add_subcommand("report", "Aggregate a per-example JSONL");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "Per-example JSONL")->required();
  report->add_option("--out", report_out, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);
  kaping_set_logging(quiet ? 0 : 1);

  if (run->parsed()) {
    auto source = load_config(run_config);
    if (!source) return 1;
    json& cfg = source->config;
    if (method) cfg["method"] = *method;
    if (k) cfg["k"] = *k;
    if (hops) cfg["hops"] = *hops;
    if (order) cfg["prompt"]["ordering"] = *order;
    if (question_template) cfg["prompt"]["question_template"] = *question_template;
    if (seed) cfg["seed"] = *seed;
    if (out_dir) {
      cfg["out"] = std::filesystem::absolute(*out_dir).string();
    }
    try {
      for (const auto& a : assignments) set_field(cfg, a);
    } catch (const CLI::Error& e) {
      return app.exit(e);
    }
    CString result;
    kaping_status st = kaping_run(cfg.dump().c_str(), source->base_dir.c_str(), &result.p);
    if (st != KAPING_OK) return report_failure(st);
    std::cout << result.p << '\n';
    return 0;
  }

  if (score->parsed()) {
    CString result;
    kaping_status st = kaping_score_jsonl(score_in.c_str(), &result.p);
    if (st != KAPING_OK) return report_failure(st);
    return write_output(score_out, result.p) ? 0 : 1;
  }

  if (retrieve->parsed()) {
    auto source = load_config(retrieve_config);
    if (!source) return 1;
    const std::string cfg_text = source->config.dump();
    kaping_graph* graph = nullptr;
    kaping_status st = kaping_graph_load_from_config(
        cfg_text.c_str(), source->base_dir.c_str(), &graph);
    if (st != KAPING_OK) return report_failure(st);
    std::unique_ptr<kaping_graph, decltype(&kaping_graph_free)> owned(graph, kaping_graph_free);
    CString result;
    st = kaping_retrieve(graph, cfg_text.c_str(), question.c_str(), entities.c_str(),
                         retrieve_k, &result.p);
    if (st != KAPING_OK) return report_failure(st);
    std::cout << result.p << '\n';
    return 0;
  }

  if (report->parsed()) {
    CString result;
    kaping_status st = kaping_report_jsonl(report_in.c_str(), &result.p);
    if (st != KAPING_OK) return report_failure(st);
    return write_output(report_out, std::string(result.p) + "\n") ? 0 : 1;
  }
  return 0;
}
