#pragma once

// Prompt rendering: knowledge block + question, joined with '\n'.
//
//   [demo 1 ... demo m]               "Question: <q> Answer: <a>" per line
//   <instruction line>                omitted with the whole block when no
//   <verbalized triple> per line      knowledge is included
//   <rendered question>
//
// No trailing newline. When a token budget is exceeded, lowest-scored
// triples go first, then demos from the end.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kaping/retriever.hpp"

namespace kaping {

enum class QuestionTemplate {
  question_answer,  // "Question: <q> Answer:"  (config name: default)
  please,           // "Please answer the following question: <q>"
};

struct KnowledgeInstruction {
  enum class Kind { meaningful, might_be, custom };
  Kind kind = Kind::meaningful;
  std::string custom_text;

  std::string text() const;
};

struct Ordering {
  enum class Kind { relevant_last, relevant_first, shuffled };
  Kind kind = Kind::relevant_last;
  std::uint64_t seed = 0;  // shuffled only
};

struct Demonstration {
  std::string question;
  std::string answer;
};

struct PromptSpec {
  QuestionTemplate question_template = QuestionTemplate::question_answer;
  KnowledgeInstruction knowledge_instruction;
  Ordering ordering;
  std::vector<Demonstration> fewshot_demos;
  std::size_t max_input_tokens = 1024;
  std::size_t max_output_tokens = 128;

  // Throws Error(config) on a zero budget or an empty custom instruction.
  void validate() const;
};

struct RenderedPrompt {
  std::string text;
  std::vector<ScoredTriple> included_triples;  // ranking order
  std::vector<std::string> included_lines;     // generated-knowledge lines
  std::size_t included_demos = 0;
  bool truncated = false;
};

using TokenCounter = std::function<std::size_t(std::string_view)>;

extern const char* const kMeaningfulInstruction;
extern const char* const kMightBeInstruction;

std::string render_question(QuestionTemplate tmpl, std::string_view question);

// Empty string when `triples` is empty. Triples are taken in rank order and
// laid out per `ordering`.
std::string render_knowledge_block(const KnowledgeInstruction& instruction,
                                   std::span<const ScoredTriple> triples,
                                   const Ordering& ordering);

RenderedPrompt render_prompt(const PromptSpec& spec,
                             std::span<const ScoredTriple> triples,
                             std::string_view question,
                             const TokenCounter& count_tokens = {});

// Free-text knowledge lines (generated-knowledge baseline). Lines render in
// the given order; truncation drops from the end.
RenderedPrompt render_prompt_with_lines(const PromptSpec& spec,
                                        std::span<const std::string> lines,
                                        std::string_view question,
                                        const TokenCounter& count_tokens = {});

}  // namespace kaping
