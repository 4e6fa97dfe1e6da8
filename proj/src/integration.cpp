#include "nlki/integration.hpp"

#include <cctype>
#include <map>

#include "nlki/errors.hpp"

namespace nlki {

ReaderInput build_reader_input(const std::string& knowledge, const std::string& question, std::size_t budget,
                               const Tokenizer& tokenizer) {
    if (budget == 0) throw ValidationError("token budget must be >= 1");
    if (tokenizer.tokenize(question).empty()) throw ValidationError("question is empty");

    ReaderInput out;
    out.token_budget = budget;
    const bool has_knowledge = !tokenizer.tokenize(knowledge).empty();
    const std::string full = has_knowledge ? knowledge + std::string(kSepToken) + question : question;
    const auto spans = tokenizer.tokenize_spans(full);

    const std::size_t question_tokens = tokenizer.tokenize(question).size();
    out.budget_below_question = budget < question_tokens;

    if (spans.size() <= budget) {
        out.text = full;
        for (const auto& s : spans) out.tokens.push_back(s.text);
        return out;
    }
    out.truncated = true;
    out.text = full.substr(0, spans[budget - 1].end);
    for (std::size_t i = 0; i < budget; ++i) out.tokens.push_back(spans[i].text);
    return out;
}

ReaderInput build_k_fact_input(const std::vector<Fact>& facts, const std::string& question, std::size_t budget,
                               const Tokenizer& tokenizer) {
    std::string knowledge;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        std::string_view text = facts[i].text;
        while (!text.empty() && (text.back() == '.' || std::isspace(static_cast<unsigned char>(text.back()))))
            text.remove_suffix(1);
        if (i) knowledge += ". ";
        knowledge += text;
    }
    return build_reader_input(knowledge, question, budget, tokenizer);
}

Prediction majority_vote(const std::vector<Prediction>& predictions) {
    if (predictions.empty()) throw ValidationError("majority_vote needs at least one prediction");
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::size_t> first_seen;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        ++counts[predictions[i].label];
        first_seen.emplace(predictions[i].label, i);
    }
    std::size_t best = predictions.size();
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {
        const std::size_t first = first_seen[label];
        if (count > best_count || (count == best_count && first < best)) {
            best = first;
            best_count = count;
        }
    }
    Prediction out = predictions[best];
    out.provenance = "majority(" + std::to_string(predictions.size()) + ")";
    return out;
}

}  // namespace nlki
