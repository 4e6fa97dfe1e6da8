#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nlki {

inline constexpr std::string_view kSepToken = "[SEP]";

// One token plus the byte range [begin, end) of the raw word it came from.
// Cutting the source text at `end` and re-tokenizing yields exactly the
// tokens up to and including this one.
struct TokenSpan {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::vector<TokenSpan> tokenize_spans(std::string_view text) const = 0;

    std::vector<std::string> tokenize(std::string_view text) const;
};

// Lowercase, whitespace split, ASCII punctuation stripped from token edges.
// Special tokens ("[SEP]") are kept verbatim and split out even when glued
// to neighbouring words.
class WhitespaceTokenizer final : public Tokenizer {
public:
    WhitespaceTokenizer();
    explicit WhitespaceTokenizer(std::vector<std::string> special_tokens);

    std::vector<TokenSpan> tokenize_spans(std::string_view text) const override;

private:
    std::vector<std::string> special_;
};

const Tokenizer& default_tokenizer();

std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace nlki
