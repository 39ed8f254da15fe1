#pragma once

// In-memory knowledge graph: entities with aliases, named relations and an
// ordered triple list with per-entity incidence lists.
//
// Loaded from TSV:
//   triples   subject_id \t relation_id \t object
//             object = E:<entity_id> | L:<plain|time|quantity>:<value>
//   entities  entity_id \t canonical_name \t alias1|alias2|...
//   relations relation_id \t relation_name
// Lines starting with '#' and blank lines are skipped in every file.
//
// The graph is immutable after load and safe to share across threads.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace kaping {

template <typename Tag>
struct StrongId {
  std::string value;

  StrongId() = default;
  explicit StrongId(std::string v) : value(std::move(v)) {}

  auto operator<=>(const StrongId&) const = default;
  bool operator==(const StrongId&) const = default;
};

struct EntityTag {};
struct RelationTag {};
using EntityId = StrongId<EntityTag>;
using RelationId = StrongId<RelationTag>;

struct StrongIdHash {
  template <typename Tag>
  std::size_t operator()(const StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};

struct Entity {
  EntityId id;
  std::optional<std::string> name;  // absent for unnamed entities
  std::vector<std::string> aliases;

  bool named() const { return name.has_value() && !name->empty(); }
};

struct Relation {
  RelationId id;
  std::string name;
};

enum class LiteralType { plain, time, quantity };

const char* to_string(LiteralType type);
std::optional<LiteralType> parse_literal_type(std::string_view s);

struct EntityRef {
  EntityId id;
  bool operator==(const EntityRef&) const = default;
};

struct Literal {
  std::string value;
  LiteralType type = LiteralType::plain;
  bool operator==(const Literal&) const = default;
};

using ObjectTerm = std::variant<EntityRef, Literal>;

struct Triple {
  EntityId subject;
  RelationId relation;
  ObjectTerm object;

  bool operator==(const Triple&) const = default;

  // Entity-valued object, if any.
  const EntityId* object_entity() const {
    const auto* ref = std::get_if<EntityRef>(&object);
    return ref ? &ref->id : nullptr;
  }
};

using EntityIdSet = std::set<EntityId>;

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Parses the three TSV files. `relations_path` may be empty, in which case
  // `relations.tsv` next to the entities file is used if present; relations
  // without a name row are named by their id. Throws kaping::Error (parse,
  // io, dangling_reference).
  static KnowledgeGraph load(const std::filesystem::path& triples_path,
                             const std::filesystem::path& entities_path,
                             const std::filesystem::path& relations_path = {});

  // Programmatic construction, used by tests and fixtures. Enforces the same
  // invariants as load(): unknown entity references throw, duplicate triples
  // are dropped (returns false).
  void add_entity(Entity entity);
  void add_relation(Relation relation);
  bool add_triple(Triple triple);

  const Entity* find_entity(const EntityId& id) const;
  const Relation* find_relation(const RelationId& id) const;

  // Display name of an entity: canonical name, or the raw id when unnamed.
  std::string entity_label(const EntityId& id) const;
  std::string relation_label(const RelationId& id) const;

  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t relation_count() const { return relations_.size(); }

  // Entities in ingestion order.
  const std::vector<EntityId>& entity_order() const { return entity_order_; }

  // Indices (ascending) of triples incident to `id` as subject or object.
  const std::vector<std::size_t>& incident(const EntityId& id) const;

  // Triples within `hops` (1 or 2) of the seeds, deduplicated, in ingestion
  // order. Expansion for the second hop goes through entity endpoints only.
  std::vector<Triple> neighborhood(const EntityIdSet& seeds, int hops) const;
  std::vector<std::size_t> neighborhood_indices(const EntityIdSet& seeds,
                                                int hops) const;

  std::map<RelationId, std::size_t> relation_frequency() const;

  // Exact surface-form linker over canonical names and aliases after
  // normalize_text. Longest match first; matches overlapping an accepted
  // longer match are dropped.
  EntityIdSet link_entities(std::string_view question) const;

  // Stable textual dump; identical graphs serialize identically.
  std::string serialize() const;

 private:
  void index_surface(const std::string& surface, const EntityId& id);

  std::unordered_map<EntityId, Entity, StrongIdHash> entities_;
  std::vector<EntityId> entity_order_;
  std::unordered_map<RelationId, Relation, StrongIdHash> relations_;
  std::vector<RelationId> relation_order_;
  std::vector<Triple> triples_;
  std::unordered_set<std::string> triple_keys_;
  std::unordered_map<EntityId, std::vector<std::size_t>, StrongIdHash>
      adjacency_;

  // normalized surface form -> entity ids
  std::map<std::string, std::vector<EntityId>> surface_index_;
  std::size_t longest_surface_tokens_ = 0;
};

// Hook for replacing the exact-surface linker with an external one.
class EntityLinker {
 public:
  virtual ~EntityLinker() = default;
  virtual EntityIdSet link(const KnowledgeGraph& graph,
                           std::string_view question) const = 0;
};

class SurfaceFormLinker final : public EntityLinker {
 public:
  EntityIdSet link(const KnowledgeGraph& graph,
                   std::string_view question) const override {
    return graph.link_entities(question);
  }
};

}  // namespace kaping
