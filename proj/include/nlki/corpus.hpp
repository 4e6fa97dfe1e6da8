#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace nlki {

// One commonsense sentence. `tokens` is derived from `text` by the default tokenizer.
struct Fact {
    std::string id;
    std::string text;
    std::string source;
    std::vector<std::string> tokens;
};

// Builds a Fact, validating the text and deriving tokens. Throws ValidationError.
Fact make_fact(std::string id, std::string text, std::string source);

// Ordered, immutable-after-load collection of facts with unique ids.
class Corpus {
public:
    Corpus() = default;
    Corpus(std::string name, std::vector<Fact> facts);

    const std::string& name() const { return name_; }
    const std::vector<Fact>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }
    bool empty() const { return facts_.empty(); }
    const Fact& operator[](std::size_t i) const { return facts_[i]; }

    const Fact* find(const std::string& id) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    auto begin() const { return facts_.begin(); }
    auto end() const { return facts_.end(); }

private:
    std::string name_;
    std::vector<Fact> facts_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct EvalRecord {
    std::string id;
    std::string image_ref;
    std::string question;
    std::vector<std::string> options;
    std::string gold_answer;
    std::optional<std::string> gold_explanation;
    std::string dataset;
};

void validate_record(const EvalRecord& record);

Corpus read_corpus(std::istream& in, std::string name = "corpus");
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

std::vector<EvalRecord> read_records(std::istream& in);
std::vector<EvalRecord> load_records(const std::filesystem::path& path);
void write_records(std::ostream& out, const std::vector<EvalRecord>& records);
void save_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records);

// Canonical single-line JSON encodings (key order fixed).
std::string fact_to_json_line(const Fact& fact);
std::string record_to_json_line(const EvalRecord& record);

}  // namespace nlki
