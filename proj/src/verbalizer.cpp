#include "kaping/verbalizer.hpp"

namespace kaping {

std::string object_text(const ObjectTerm& object, const KnowledgeGraph& graph) {
  if (const auto* ref = std::get_if<EntityRef>(&object)) {
    return graph.entity_label(ref->id);
  }
  const auto& lit = std::get<Literal>(object);
  switch (lit.type) {
    case LiteralType::time: return "time: " + lit.value;
    case LiteralType::quantity: return "quantity: " + lit.value;
    case LiteralType::plain: break;
  }
  return lit.value;
}

VerbalizedTriple verbalize(const Triple& triple, const KnowledgeGraph& graph) {
  std::string text = "(";
  text += graph.entity_label(triple.subject);
  text += ", ";
  text += graph.relation_label(triple.relation);
  text += ", ";
  text += object_text(triple.object, graph);
  text += ')';
  return VerbalizedTriple{std::move(text), triple};
}

}  // namespace kaping
