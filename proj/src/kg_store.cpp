#include "kaping/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kaping/error.hpp"
#include "kaping/log.hpp"
#include "kaping/text.hpp"

namespace kaping {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::dangling_reference: return "dangling reference";
    case ErrorKind::config: return "config error";
    case ErrorKind::transport: return "transport error";
    case ErrorKind::oversize: return "prompt oversize";
  }
  return "unknown error";
}

const char* to_string(LiteralType type) {
  switch (type) {
    case LiteralType::plain: return "plain";
    case LiteralType::time: return "time";
    case LiteralType::quantity: return "quantity";
  }
  return "plain";
}

std::optional<LiteralType> parse_literal_type(std::string_view s) {
  if (s == "plain") return LiteralType::plain;
  if (s == "time") return LiteralType::time;
  if (s == "quantity") return LiteralType::quantity;
  return std::nullopt;
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Calls `fn(fields, line_no)` for every non-comment, non-blank line.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(split(line, '\t'), line_no);
  }
}

[[noreturn]] void fail_at(ErrorKind kind, const std::filesystem::path& path,
                          std::size_t line_no, const std::string& reason) {
  throw Error(kind, path.string() + ":" + std::to_string(line_no) + ": " +
                        reason);
}

std::string triple_key(const Triple& t) {
  std::string key = t.subject.value;
  key += '\t';
  key += t.relation.value;
  key += '\t';
  if (const auto* ref = std::get_if<EntityRef>(&t.object)) {
    key += "E:" + ref->id.value;
  } else {
    const auto& lit = std::get<Literal>(t.object);
    key += std::string("L:") + to_string(lit.type) + ":" + lit.value;
  }
  return key;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& triples_path,
                                    const std::filesystem::path& entities_path,
                                    const std::filesystem::path& relations_path) {
  KnowledgeGraph graph;

  for_each_row(entities_path, [&](const std::vector<std::string>& f,
                                  std::size_t line_no) {
    if (f.size() > 3) {
      fail_at(ErrorKind::parse, entities_path, line_no,
              "expected at most 3 tab-separated columns, got " +
                  std::to_string(f.size()));
    }
    if (f[0].empty()) fail_at(ErrorKind::parse, entities_path, line_no,
                              "empty entity id");
    EntityId id(f[0]);
    if (graph.find_entity(id)) {
      fail_at(ErrorKind::parse, entities_path, line_no,
              "duplicate entity id " + id.value);
    }
    Entity entity;
    entity.id = id;
    if (f.size() >= 2 && !f[1].empty()) entity.name = f[1];
    if (f.size() == 3) entity.aliases = split(f[2], '|');
    graph.add_entity(std::move(entity));
  });

  std::filesystem::path rel_path = relations_path;
  if (rel_path.empty()) {
    auto sibling = entities_path.parent_path() / "relations.tsv";
    if (std::filesystem::exists(sibling)) rel_path = sibling;
  }
  if (!rel_path.empty()) {
    for_each_row(rel_path, [&](const std::vector<std::string>& f,
                               std::size_t line_no) {
      if (f.size() != 2) {
        fail_at(ErrorKind::parse, rel_path, line_no,
                "expected 2 tab-separated columns, got " +
                    std::to_string(f.size()));
      }
      if (f[0].empty() || f[1].empty()) {
        fail_at(ErrorKind::parse, rel_path, line_no,
                "empty relation id or name");
      }
      graph.add_relation(Relation{RelationId(f[0]), f[1]});
    });
  }

  for_each_row(triples_path, [&](const std::vector<std::string>& f,
                                 std::size_t line_no) {
    if (f.size() != 3) {
      fail_at(ErrorKind::parse, triples_path, line_no,
              "expected 3 tab-separated columns, got " +
                  std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) {
      fail_at(ErrorKind::parse, triples_path, line_no,
              "empty subject or relation id");
    }
    Triple triple;
    triple.subject = EntityId(f[0]);
    triple.relation = RelationId(f[1]);
    const std::string& obj = f[2];
    if (obj.rfind("E:", 0) == 0 && obj.size() > 2) {
      triple.object = EntityRef{EntityId(obj.substr(2))};
    } else if (obj.rfind("L:", 0) == 0) {
      auto colon = obj.find(':', 2);
      if (colon == std::string::npos) {
        fail_at(ErrorKind::parse, triples_path, line_no,
                "literal object must be L:<datatype>:<value>");
      }
      auto type = parse_literal_type(
          std::string_view(obj).substr(2, colon - 2));
      if (!type) {
        fail_at(ErrorKind::parse, triples_path, line_no,
                "unknown literal datatype in '" + obj + "'");
      }
      std::string value = obj.substr(colon + 1);
      if (value.empty()) {
        fail_at(ErrorKind::parse, triples_path, line_no,
                "empty literal value");
      }
      triple.object = Literal{std::move(value), *type};
    } else {
      fail_at(ErrorKind::parse, triples_path, line_no,
              "object must start with E: or L:, got '" + obj + "'");
    }
    try {
      graph.add_triple(std::move(triple));
    } catch (const Error& e) {
      fail_at(e.kind(), triples_path, line_no, e.what());
    }
  });

  return graph;
}

void KnowledgeGraph::add_entity(Entity entity) {
  if (entity.id.value.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty entity id");
  }
  if (entities_.count(entity.id)) {
    throw Error(ErrorKind::invalid_argument,
                "duplicate entity id " + entity.id.value);
  }
  std::vector<std::string> aliases;
  for (auto& alias : entity.aliases) {
    if (alias.empty()) continue;
    if (entity.name && alias == *entity.name) continue;
    if (std::find(aliases.begin(), aliases.end(), alias) != aliases.end())
      continue;
    aliases.push_back(std::move(alias));
  }
  entity.aliases = std::move(aliases);

  if (entity.named()) index_surface(*entity.name, entity.id);
  for (const auto& alias : entity.aliases) index_surface(alias, entity.id);

  entity_order_.push_back(entity.id);
  adjacency_[entity.id];
  entities_.emplace(entity.id, std::move(entity));
}

void KnowledgeGraph::add_relation(Relation relation) {
  if (relation.id.value.empty() || relation.name.empty()) {
    throw Error(ErrorKind::invalid_argument, "relation id and name required");
  }
  auto it = relations_.find(relation.id);
  if (it != relations_.end()) {
    it->second.name = std::move(relation.name);
    return;
  }
  relation_order_.push_back(relation.id);
  relations_.emplace(relation.id, std::move(relation));
}

bool KnowledgeGraph::add_triple(Triple triple) {
  if (!entities_.count(triple.subject)) {
    throw Error(ErrorKind::dangling_reference,
                "unknown subject entity " + triple.subject.value);
  }
  if (const EntityId* obj = triple.object_entity()) {
    if (!entities_.count(*obj)) {
      throw Error(ErrorKind::dangling_reference,
                  "unknown object entity " + obj->value);
    }
  } else if (std::get<Literal>(triple.object).value.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty literal value");
  }
  if (!triple_keys_.insert(triple_key(triple)).second) return false;

  if (!relations_.count(triple.relation)) {
    add_relation(Relation{triple.relation, triple.relation.value});
  }
  const std::size_t index = triples_.size();
  adjacency_[triple.subject].push_back(index);
  if (const EntityId* obj = triple.object_entity()) {
    if (*obj != triple.subject) adjacency_[*obj].push_back(index);
  }
  triples_.push_back(std::move(triple));
  return true;
}

const Entity* KnowledgeGraph::find_entity(const EntityId& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

const Relation* KnowledgeGraph::find_relation(const RelationId& id) const {
  auto it = relations_.find(id);
  return it == relations_.end() ? nullptr : &it->second;
}

std::string KnowledgeGraph::entity_label(const EntityId& id) const {
  const Entity* e = find_entity(id);
  if (e && e->named()) return *e->name;
  log::warn("entity " + id.value + " has no name; rendering raw id");
  return id.value;
}

std::string KnowledgeGraph::relation_label(const RelationId& id) const {
  const Relation* r = find_relation(id);
  return r ? r->name : id.value;
}

const std::vector<std::size_t>& KnowledgeGraph::incident(
    const EntityId& id) const {
  static const std::vector<std::size_t> empty;
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty : it->second;
}

std::vector<std::size_t> KnowledgeGraph::neighborhood_indices(
    const EntityIdSet& seeds, int hops) const {
  if (hops != 1 && hops != 2) {
    throw Error(ErrorKind::invalid_argument,
                "hops must be 1 or 2, got " + std::to_string(hops));
  }
  std::vector<char> taken(triples_.size(), 0);
  std::vector<std::size_t> first_hop;
  for (const auto& seed : seeds) {
    if (!entities_.count(seed)) {
      log::warn("seed entity " + seed.value + " not in graph; skipped");
      continue;
    }
    for (std::size_t idx : incident(seed)) {
      if (!taken[idx]) {
        taken[idx] = 1;
        first_hop.push_back(idx);
      }
    }
  }
  if (hops == 2) {
    for (std::size_t idx : first_hop) {
      const Triple& t = triples_[idx];
      for (std::size_t j : incident(t.subject)) taken[j] = 1;
      if (const EntityId* obj = t.object_entity()) {
        for (std::size_t j : incident(*obj)) taken[j] = 1;
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (taken[i]) out.push_back(i);
  }
  return out;
}

std::vector<Triple> KnowledgeGraph::neighborhood(const EntityIdSet& seeds,
                                                 int hops) const {
  std::vector<Triple> out;
  for (std::size_t idx : neighborhood_indices(seeds, hops)) {
    out.push_back(triples_[idx]);
  }
  return out;
}

std::map<RelationId, std::size_t> KnowledgeGraph::relation_frequency() const {
  std::map<RelationId, std::size_t> counts;
  for (const auto& t : triples_) ++counts[t.relation];
  return counts;
}

void KnowledgeGraph::index_surface(const std::string& surface,
                                   const EntityId& id) {
  std::string norm = normalize_text(surface);
  if (norm.empty()) return;
  auto& ids = surface_index_[norm];
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  std::size_t tokens =
      static_cast<std::size_t>(std::count(norm.begin(), norm.end(), ' ')) + 1;
  longest_surface_tokens_ = std::max(longest_surface_tokens_, tokens);
}

EntityIdSet KnowledgeGraph::link_entities(std::string_view question) const {
  EntityIdSet result;
  const std::vector<std::string> tokens = word_tokens(question);
  if (tokens.empty() || surface_index_.empty()) return result;

  struct Match {
    std::size_t start;
    std::size_t length;
    const std::vector<EntityId>* ids;
  };
  std::vector<Match> matches;
  const std::size_t max_len = std::min(longest_surface_tokens_, tokens.size());
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    std::string span;
    for (std::size_t len = 1; len <= max_len && start + len <= tokens.size();
         ++len) {
      if (len > 1) span += ' ';
      span += tokens[start + len - 1];
      auto it = surface_index_.find(span);
      if (it != surface_index_.end()) {
        matches.push_back(Match{start, len, &it->second});
      }
    }
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const Match& a, const Match& b) {
                     return a.length > b.length;
                   });
  std::vector<char> covered(tokens.size(), 0);
  for (const Match& m : matches) {
    bool overlaps = false;
    for (std::size_t i = m.start; i < m.start + m.length; ++i) {
      overlaps = overlaps || covered[i];
    }
    if (overlaps) continue;
    std::fill(covered.begin() + static_cast<std::ptrdiff_t>(m.start),
              covered.begin() + static_cast<std::ptrdiff_t>(m.start + m.length),
              1);
    result.insert(m.ids->begin(), m.ids->end());
  }
  return result;
}

std::string KnowledgeGraph::serialize() const {
  std::ostringstream out;
  for (const auto& id : entity_order_) {
    const Entity& e = entities_.at(id);
    out << "E\t" << id.value << '\t' << e.name.value_or("") << '\t';
    for (std::size_t i = 0; i < e.aliases.size(); ++i) {
      out << (i ? "|" : "") << e.aliases[i];
    }
    out << '\n';
  }
  for (const auto& id : relation_order_) {
    out << "R\t" << id.value << '\t' << relations_.at(id).name << '\n';
  }
  for (const auto& t : triples_) out << "T\t" << triple_key(t) << '\n';
  return out.str();
}

}  // namespace kaping
