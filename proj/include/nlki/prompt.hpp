#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/corpus.hpp"

namespace nlki {

enum class PromptType : std::uint8_t { Type0, Type1, Type2, Type3, Type4, Type5, Type6, Type7 };

// Prompt components, in template order.
enum class Component : std::uint8_t { TC, DC, RC, O, Q, RF, GT_L };

PromptType parse_prompt_type(std::string_view name);  // "0".."7" or "Type5" / "type-5"
std::string to_string(PromptType t);
std::string_view to_string(Component c);

// Component set of each type. Type7 has no local template and returns {}.
std::vector<Component> prompt_components(PromptType t);

// Per-dataset forbidden word lists; datasets without an override fall back
// to the built-in lists.
class ForbiddenWords {
public:
    ForbiddenWords() = default;
    explicit ForbiddenWords(std::map<std::string, std::vector<std::string>> overrides)
        : overrides_(std::move(overrides)) {}

    std::vector<std::string> for_dataset(std::string_view dataset) const;

private:
    std::map<std::string, std::vector<std::string>> overrides_;
};

// True for the visual-entailment dataset tag ("esnlive", "e-SNLI-VE", ...).
bool is_nli_dataset(std::string_view dataset);

struct PromptInputs {
    std::string question;
    VisualContext context;
    std::vector<Fact> facts;
    std::optional<std::string> gold_label;
    std::string dataset;
};

// Renders the fixed explanation template for Types 0-6. Throws
// ValidationError for a missing component, for a gold label on a non-Type0
// prompt, and for Type7 (use type7_task_prompt instead).
std::string assemble_prompt(PromptType type, const PromptInputs& in,
                            const ForbiddenWords& forbidden = ForbiddenWords());

// Task prompt sent with the image for Type-7 generation.
std::string type7_task_prompt(const std::string& question);

struct ExplanationText {
    std::string text;
    std::size_t word_count = 0;
    PromptType source_kind = PromptType::Type5;
    bool length_warning = false;  // outside the requested 15-20 words
};

struct Rejection {
    std::string matched;
};

using FilterResult = std::variant<ExplanationText, Rejection>;

inline constexpr std::size_t kMinExplanationWords = 15;
inline constexpr std::size_t kMaxExplanationWords = 20;

// Case-insensitive scan for the dataset's forbidden words.
FilterResult filter_output(std::string_view text, std::string_view dataset, PromptType source_kind = PromptType::Type5,
                           const ForbiddenWords& forbidden = ForbiddenWords());

}  // namespace nlki
