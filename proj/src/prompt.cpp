#include "nlki/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "nlki/errors.hpp"

namespace nlki {

namespace {

constexpr std::string_view kHeader =
    "Given an image description, the task is to generate an explanation based on the following information.";
constexpr std::string_view kInstruction =
    "You strictly need to produce a 15-20 word single-line explanation to help VQA models derive "
    "conclusions and nothing else.";

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Terminates a labeled value with "." unless it already ends a sentence.
std::string terminated(std::string_view s) {
    std::string out(s);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    if (out.empty() || (out.back() != '.' && out.back() != '?' && out.back() != '!')) out += '.';
    return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.append(sep);
        out.append(items[i]);
    }
    return out;
}

bool has_text(const std::optional<std::string>& s) {
    return s && s->find_first_not_of(" \t\r\n") != std::string::npos;
}

bool has_items(const std::optional<std::vector<std::string>>& v) { return v && !v->empty(); }

[[noreturn]] void missing(PromptType t, Component c) {
    throw ValidationError(to_string(t) + " prompt requires component " + std::string(to_string(c)));
}

}  // namespace

PromptType parse_prompt_type(std::string_view name) {
    std::string s = lower(name);
    for (std::string_view prefix : {"type-", "type_", "type"}) {
        if (s.rfind(prefix, 0) == 0) {
            s = s.substr(prefix.size());
            break;
        }
    }
    if (s.size() == 1 && s[0] >= '0' && s[0] <= '7') return static_cast<PromptType>(s[0] - '0');
    throw ValidationError("unknown prompt type \"" + std::string(name) + "\"");
}

std::string to_string(PromptType t) { return "Type" + std::to_string(static_cast<int>(t)); }

std::string_view to_string(Component c) {
    switch (c) {
        case Component::TC: return "TC";
        case Component::DC: return "DC";
        case Component::RC: return "RC";
        case Component::O: return "O";
        case Component::Q: return "Q";
        case Component::RF: return "RF";
        case Component::GT_L: return "GT-L";
    }
    return "?";
}

std::vector<Component> prompt_components(PromptType t) {
    using C = Component;
    switch (t) {
        case PromptType::Type0: return {C::TC, C::Q, C::RF, C::GT_L};
        case PromptType::Type1: return {C::TC, C::Q, C::RF};
        case PromptType::Type2: return {C::DC, C::Q, C::RF};
        case PromptType::Type3: return {C::RC, C::Q, C::RF};
        case PromptType::Type4: return {C::RC, C::O, C::Q, C::RF};
        case PromptType::Type5: return {C::DC, C::RC, C::O, C::Q, C::RF};
        case PromptType::Type6: return {C::DC, C::RC, C::O, C::Q};
        case PromptType::Type7: return {};
    }
    return {};
}

bool is_nli_dataset(std::string_view dataset) {
    std::string key;
    for (char c : dataset) {
        if (std::isalnum(static_cast<unsigned char>(c))) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return key == "esnlive" || key == "snlive";
}

std::vector<std::string> ForbiddenWords::for_dataset(std::string_view dataset) const {
    if (auto it = overrides_.find(std::string(dataset)); it != overrides_.end()) return it->second;
    std::vector<std::string> words = {"image description", "captions"};
    if (is_nli_dataset(dataset)) {
        words.emplace_back("entailment");
        words.emplace_back("contradiction");
    }
    return words;
}

std::string assemble_prompt(PromptType type, const PromptInputs& in, const ForbiddenWords& forbidden) {
    if (type == PromptType::Type7) throw ValidationError("Type7 has no local template; use type7_task_prompt");
    const auto components = prompt_components(type);
    const auto wants = [&](Component c) { return std::find(components.begin(), components.end(), c) != components.end(); };

    if (in.question.find_first_not_of(" \t\r\n") == std::string::npos) missing(type, Component::Q);
    if (wants(Component::GT_L) && !has_text(in.gold_label)) missing(type, Component::GT_L);
    if (!wants(Component::GT_L) && in.gold_label) {
        throw ValidationError("gold label supplied for " + to_string(type) + " (only Type0 takes one)");
    }

    const VisualContext& ctx = in.context;
    std::string out(kHeader);
    out += "\n\n";
    if (wants(Component::TC)) {
        if (!has_text(ctx.traditional_caption)) missing(type, Component::TC);
        out += "Traditional-Caption-(TC): " + terminated(*ctx.traditional_caption) + "\n";
    }
    if (wants(Component::DC)) {
        if (!has_text(ctx.dense_caption)) missing(type, Component::DC);
        out += "Dense Caption (DC): " + terminated(*ctx.dense_caption) + "\n";
    }
    if (wants(Component::RC)) {
        if (!has_items(ctx.region_captions)) missing(type, Component::RC);
        out += "Region Caption (RC): " + terminated(join(*ctx.region_captions, "; ")) + "\n";
    }
    if (wants(Component::O)) {
        if (!has_items(ctx.objects)) missing(type, Component::O);
        out += "Objects (O): " + terminated(join(*ctx.objects, ", ")) + "\n";
    }
    out += "Question (Q): " + terminated(in.question) + "\n";
    if (wants(Component::RF)) {
        if (in.facts.empty()) missing(type, Component::RF);
        out += "Retrieved Facts (RF):\n";
        for (const auto& f : in.facts) out += "Fact: " + terminated(f.text) + "\n";
    }
    if (wants(Component::GT_L)) out += "Ground-Truth Label (GT-L): " + terminated(*in.gold_label) + "\n";

    out += "\n";
    out += kInstruction;
    out += "\nForbidden words: ";
    const auto words = forbidden.for_dataset(in.dataset);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + words[i] + "\"";
    }
    out += ".\n";
    return out;
}

std::string type7_task_prompt(const std::string& question) { return "<EXPLAIN_VQA>" + question; }

FilterResult filter_output(std::string_view text, std::string_view dataset, PromptType source_kind,
                           const ForbiddenWords& forbidden) {
    const std::string hay = lower(text);
    for (const auto& w : forbidden.for_dataset(dataset)) {
        if (!w.empty() && hay.find(lower(w)) != std::string::npos) return Rejection{w};
    }
    ExplanationText out;
    out.text = std::string(text);
    out.source_kind = source_kind;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        ++out.word_count;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }
    if (out.word_count == 0) return Rejection{"<empty>"};
    out.length_warning = out.word_count < kMinExplanationWords || out.word_count > kMaxExplanationWords;
    return out;
}

}  // namespace nlki
