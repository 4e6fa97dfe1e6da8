#pragma once

#include <string>
#include <vector>

#include "nlki/corpus.hpp"
#include "nlki/tokenizer.hpp"

namespace nlki {

inline constexpr std::size_t kDefaultTokenBudget = 100;

// Reader-side text: "<knowledge>[SEP]<question>" (or the bare question)
// clipped to `token_budget` tokens from the end.
struct ReaderInput {
    std::string text;
    std::vector<std::string> tokens;
    std::string image_ref;
    std::size_t token_budget = kDefaultTokenBudget;
    bool truncated = false;
    bool budget_below_question = false;  // the question alone exceeds the budget
};

// Concatenates knowledge + "[SEP]" + question and drops tokens from the end
// until the count fits the budget. The kept text is a byte prefix of the full
// concatenation, cut right after the last kept token's word. Throws
// ValidationError for an empty question or a zero budget.
ReaderInput build_reader_input(const std::string& knowledge, const std::string& question,
                               std::size_t budget = kDefaultTokenBudget,
                               const Tokenizer& tokenizer = default_tokenizer());

// Facts (trailing periods dropped) joined by ". " form the knowledge string;
// no facts gives the bare question.
ReaderInput build_k_fact_input(const std::vector<Fact>& facts, const std::string& question,
                               std::size_t budget = kDefaultTokenBudget,
                               const Tokenizer& tokenizer = default_tokenizer());

struct Prediction {
    std::string label;
    std::vector<std::string> options;
    std::vector<double> scores;  // aligned with options
    std::string provenance;
};

// Most frequent label across predictions ordered by fact rank (rank 1
// first); ties go to the label whose first supporter has the best rank. The
// winner carries the scores of that first supporter and provenance
// "majority(n)". Throws ValidationError on an empty list.
Prediction majority_vote(const std::vector<Prediction>& predictions);

}  // namespace nlki
