#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kaping/kg_store.hpp"
#include "kaping/retriever.hpp"
#include "kaping/verbalizer.hpp"

namespace kaping::testing {

inline std::filesystem::path data_dir() { return KAPING_TEST_DATA_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("kaping-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline KnowledgeGraph chilton_graph() {
  const auto dir = data_dir() / "chilton";
  return KnowledgeGraph::load(dir / "triples.tsv", dir / "entities.tsv");
}

inline KnowledgeGraph chilton_updated_graph() {
  const auto dir = data_dir() / "chilton_updated";
  return KnowledgeGraph::load(dir / "triples.tsv", dir / "entities.tsv");
}

inline Triple make_triple(const std::string& s, const std::string& r,
                          const std::string& o) {
  return Triple{EntityId(s), RelationId(r), EntityRef{EntityId(o)}};
}

// Ranking with explicit descending scores; candidate_index = position.
inline std::vector<ScoredTriple> ranked_from(const KnowledgeGraph& graph,
                                             const std::vector<Triple>& triples,
                                             const std::vector<double>& scores) {
  std::vector<ScoredTriple> out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    ScoredTriple st;
    st.triple = triples[i];
    st.verbalized = verbalize(triples[i], graph).text;
    st.score = scores[i];
    st.rank = i + 1;
    st.candidate_index = i;
    out.push_back(std::move(st));
  }
  return out;
}

// Random graph over `entities` nodes with up to `max_triples` triples drawn
// from `relations` relation ids. Some objects are literals.
inline KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t entities,
                                   std::size_t max_triples,
                                   std::size_t relations = 5) {
  static const std::vector<std::string> words = {
      "river", "mountain", "city", "born", "died", "author", "music", "band",
      "river", "capital", "film", "actor", "wrote", "novel", "year", "club",
      "team", "played", "award", "prize", "language", "spoken", "red", "blue"};
  auto pick = [&](std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
  };
  KnowledgeGraph g;
  for (std::size_t i = 0; i < entities; ++i) {
    Entity e;
    e.id = EntityId("N" + std::to_string(i));
    if (pick(10) != 0) {
      e.name = words[pick(words.size())] + " " + words[pick(words.size())] +
               " " + std::to_string(i);
    }
    g.add_entity(std::move(e));
  }
  for (std::size_t r = 0; r < relations; ++r) {
    g.add_relation(Relation{RelationId("P" + std::to_string(r)),
                            words[pick(words.size())] + " of"});
  }
  const std::size_t n = max_triples ? pick(max_triples + 1) : 0;
  for (std::size_t i = 0; i < n; ++i) {
    Triple t;
    t.subject = EntityId("N" + std::to_string(pick(entities)));
    t.relation = RelationId("P" + std::to_string(pick(relations)));
    if (pick(5) == 0) {
      t.object = Literal{std::to_string(1900 + pick(120)), LiteralType::time};
    } else {
      t.object = EntityRef{EntityId("N" + std::to_string(pick(entities)))};
    }
    g.add_triple(std::move(t));
  }
  return g;
}

inline std::string random_question(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "where", "was", "the", "river", "born", "who", "wrote", "novel", "city",
      "capital", "of", "band", "music", "film", "award", "prize", "year",
      "when", "did", "die", "language", "red", "blue", "team", "7", "12"};
  const std::size_t n = rng() % 8;
  std::string q;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) q += (rng() % 3 == 0) ? ", " : " ";
    q += words[rng() % words.size()];
  }
  if (n) q += "?";
  return q;
}

}  // namespace kaping::testing
