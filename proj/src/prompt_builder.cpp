#include "kaping/prompt_builder.hpp"

#include <algorithm>

#include "kaping/error.hpp"
#include "kaping/text.hpp"

namespace kaping {

const char* const kMeaningfulInstruction =
    "Below are facts in the form of the triple meaningful to answer the "
    "question.";
const char* const kMightBeInstruction =
    "Below are facts in the form of the triple that might be meaningful to "
    "answer the question.";

std::string KnowledgeInstruction::text() const {
  switch (kind) {
    case Kind::meaningful: return kMeaningfulInstruction;
    case Kind::might_be: return kMightBeInstruction;
    case Kind::custom: return custom_text;
  }
  return kMeaningfulInstruction;
}

void PromptSpec::validate() const {
  if (max_input_tokens < 1) {
    throw Error(ErrorKind::config, "prompt.max_input_tokens must be >= 1");
  }
  if (max_output_tokens < 1) {
    throw Error(ErrorKind::config, "prompt.max_output_tokens must be >= 1");
  }
  if (knowledge_instruction.kind == KnowledgeInstruction::Kind::custom &&
      knowledge_instruction.custom_text.empty()) {
    throw Error(ErrorKind::config,
                "prompt.custom_instruction must be non-empty");
  }
}

std::string render_question(QuestionTemplate tmpl, std::string_view question) {
  if (question.empty()) {
    throw Error(ErrorKind::invalid_argument, "question must be non-empty");
  }
  std::string out;
  switch (tmpl) {
    case QuestionTemplate::question_answer:
      out = "Question: ";
      out += question;
      out += " Answer:";
      break;
    case QuestionTemplate::please:
      out = "Please answer the following question: ";
      out += question;
      break;
  }
  return out;
}

namespace {

std::vector<const ScoredTriple*> by_rank(std::span<const ScoredTriple> triples) {
  std::vector<const ScoredTriple*> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(&t);
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredTriple* a, const ScoredTriple* b) {
                     return a->rank < b->rank;
                   });
  return out;
}

std::string join_block(const std::string& instruction,
                       const std::vector<const std::string*>& lines) {
  if (lines.empty()) return {};
  std::string out = instruction;
  for (const auto* line : lines) {
    out += '\n';
    out += *line;
  }
  return out;
}

std::string render_demos(const PromptSpec& spec, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += '\n';
    const auto& demo = spec.fewshot_demos[i];
    out += render_question(QuestionTemplate::question_answer, demo.question);
    out += ' ';
    out += demo.answer;
  }
  return out;
}

std::string join_sections(const std::string& demos, const std::string& block,
                          const std::string& question) {
  std::string out;
  for (const auto* part : {&demos, &block}) {
    if (part->empty()) continue;
    out += *part;
    out += '\n';
  }
  out += question;
  return out;
}

// Shrinks knowledge items, then demos, until the prompt fits. `block_for(n)`
// renders the knowledge block from the n best items.
template <typename BlockFn>
RenderedPrompt fit_to_budget(const PromptSpec& spec, std::size_t items,
                             BlockFn&& block_for, std::string_view question,
                             const TokenCounter& count_tokens) {
  spec.validate();
  const TokenCounter counter =
      count_tokens ? count_tokens : TokenCounter(whitespace_token_count);
  const std::string rendered_question =
      render_question(spec.question_template, question);

  std::size_t n = items;
  std::size_t demos = spec.fewshot_demos.size();
  std::string demo_text = render_demos(spec, demos);
  RenderedPrompt out;
  while (true) {
    out.text = join_sections(demo_text, block_for(n), rendered_question);
    if (counter(out.text) <= spec.max_input_tokens) break;
    if (n > 0) {
      --n;
    } else if (demos > 0) {
      --demos;
      demo_text = render_demos(spec, demos);
    } else {
      throw Error(ErrorKind::oversize,
                  "prompt needs " + std::to_string(counter(out.text)) +
                      " tokens with no knowledge and no demos; budget is " +
                      std::to_string(spec.max_input_tokens));
    }
  }
  out.included_demos = demos;
  out.truncated = n < items || demos < spec.fewshot_demos.size();
  return out;
}

}  // namespace

std::string render_knowledge_block(const KnowledgeInstruction& instruction,
                                   std::span<const ScoredTriple> triples,
                                   const Ordering& ordering) {
  if (triples.empty()) return {};
  auto ranked = by_rank(triples);
  std::vector<const std::string*> lines;
  lines.reserve(ranked.size());
  switch (ordering.kind) {
    case Ordering::Kind::relevant_first:
      for (const auto* t : ranked) lines.push_back(&t->verbalized);
      break;
    case Ordering::Kind::relevant_last:
      for (auto it = ranked.rbegin(); it != ranked.rend(); ++it) {
        lines.push_back(&(*it)->verbalized);
      }
      break;
    case Ordering::Kind::shuffled:
      for (std::size_t idx : seeded_permutation(ranked.size(), ordering.seed)) {
        lines.push_back(&ranked[idx]->verbalized);
      }
      break;
  }
  return join_block(instruction.text(), lines);
}

RenderedPrompt render_prompt(const PromptSpec& spec,
                             std::span<const ScoredTriple> triples,
                             std::string_view question,
                             const TokenCounter& count_tokens) {
  auto ranked = by_rank(triples);
  std::vector<ScoredTriple> ordered;
  ordered.reserve(ranked.size());
  for (const auto* t : ranked) ordered.push_back(*t);

  std::size_t kept = 0;
  auto block_for = [&](std::size_t n) {
    kept = n;
    return render_knowledge_block(
        spec.knowledge_instruction,
        std::span<const ScoredTriple>(ordered.data(), n), spec.ordering);
  };
  RenderedPrompt out =
      fit_to_budget(spec, ordered.size(), block_for, question, count_tokens);
  out.included_triples.assign(ordered.begin(),
                              ordered.begin() + static_cast<std::ptrdiff_t>(kept));
  return out;
}

RenderedPrompt render_prompt_with_lines(const PromptSpec& spec,
                                        std::span<const std::string> lines,
                                        std::string_view question,
                                        const TokenCounter& count_tokens) {
  std::size_t kept = 0;
  const std::string instruction = spec.knowledge_instruction.text();
  auto block_for = [&](std::size_t n) {
    kept = n;
    std::vector<const std::string*> ptrs;
    for (std::size_t i = 0; i < n; ++i) ptrs.push_back(&lines[i]);
    return join_block(instruction, ptrs);
  };
  RenderedPrompt out =
      fit_to_budget(spec, lines.size(), block_for, question, count_tokens);
  out.included_lines.assign(lines.begin(),
                            lines.begin() + static_cast<std::ptrdiff_t>(kept));
  return out;
}

}  // namespace kaping
