#include "nlki/tokenizer.hpp"

#include <cctype>

namespace nlki {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_punct(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u) != 0;
}

// Appends the normalized token for raw[b, e) (offsets relative to `base`).
void emit_word(std::string_view raw, std::size_t b, std::size_t e, std::size_t base,
               std::vector<TokenSpan>& out) {
    std::size_t lo = b;
    std::size_t hi = e;
    while (lo < hi && is_punct(raw[lo])) ++lo;
    while (hi > lo && is_punct(raw[hi - 1])) --hi;
    if (lo == hi) return;
    std::string tok(raw.substr(lo, hi - lo));
    for (char& c : tok) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    out.push_back(TokenSpan{std::move(tok), base + b, base + e});
}

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    for (auto& span : tokenize_spans(text)) out.push_back(std::move(span.text));
    return out;
}

WhitespaceTokenizer::WhitespaceTokenizer() : special_{std::string(kSepToken)} {}

WhitespaceTokenizer::WhitespaceTokenizer(std::vector<std::string> special_tokens)
    : special_(std::move(special_tokens)) {}

std::vector<TokenSpan> WhitespaceTokenizer::tokenize_spans(std::string_view text) const {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        if (i >= n) break;
        std::size_t j = i;
        while (j < n && !is_space(text[j])) ++j;
        std::string_view word = text.substr(i, j - i);

        // Split the word around special tokens.
        std::size_t start = 0;
        std::size_t pos = 0;
        while (pos < word.size()) {
            bool matched = false;
            for (const auto& sp : special_) {
                if (!sp.empty() && word.compare(pos, sp.size(), sp) == 0) {
                    emit_word(word, start, pos, i, out);
                    out.push_back(TokenSpan{sp, i + pos, i + pos + sp.size()});
                    pos += sp.size();
                    start = pos;
                    matched = true;
                    break;
                }
            }
            if (!matched) ++pos;
        }
        emit_word(word, start, word.size(), i, out);
        i = j;
    }
    return out;
}

const Tokenizer& default_tokenizer() {
    static const WhitespaceTokenizer tokenizer;
    return tokenizer;
}

std::vector<std::string> tokenize(std::string_view text) { return default_tokenizer().tokenize(text); }

std::string join_tokens(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.append(sep);
        out.append(tokens[i]);
    }
    return out;
}

}  // namespace nlki
