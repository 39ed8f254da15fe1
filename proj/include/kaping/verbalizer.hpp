#pragma once

#include <string>

#include "kaping/kg_store.hpp"

namespace kaping {

struct VerbalizedTriple {
  std::string text;
  Triple source;
};

// Linear form "(subject, relation, object)". Typed literals carry a
// "time: " / "quantity: " prefix; unnamed entities render as their id.
VerbalizedTriple verbalize(const Triple& triple, const KnowledgeGraph& graph);

std::string object_text(const ObjectTerm& object, const KnowledgeGraph& graph);

}  // namespace kaping
