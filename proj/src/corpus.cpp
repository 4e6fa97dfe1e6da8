#include "nlki/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/tokenizer.hpp"

namespace nlki {

using ojson = nlohmann::ordered_json;

namespace {

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string required_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
    if (!it->is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

// Calls fn(line_number, parsed_object) for every non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
        try {
            fn(line_no, obj);
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
    }
}

}  // namespace

Fact make_fact(std::string id, std::string text, std::string source) {
    if (id.empty()) throw ValidationError("fact id is empty");
    if (is_blank(text)) throw ValidationError("fact " + id + " has empty text");
    auto tokens = tokenize(text);
    if (tokens.empty()) throw ValidationError("fact " + id + " has no tokens");
    return Fact{std::move(id), std::move(text), std::move(source), std::move(tokens)};
}

Corpus::Corpus(std::string name, std::vector<Fact> facts) : name_(std::move(name)), facts_(std::move(facts)) {
    by_id_.reserve(facts_.size());
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(facts_[i].id, i);
        if (!inserted) {
            throw ValidationError("duplicate id " + facts_[i].id + " at positions " +
                                  std::to_string(it->second + 1) + "," + std::to_string(i + 1));
        }
    }
}

const Fact* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &facts_[it->second];
}

std::optional<std::size_t> Corpus::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

void validate_record(const EvalRecord& r) {
    if (r.id.empty()) throw ValidationError("record id is empty");
    if (is_blank(r.question)) throw ValidationError("record " + r.id + " has empty question");
    if (!r.options.empty()) {
        bool found = false;
        for (const auto& o : r.options) found = found || o == r.gold_answer;
        if (!found) {
            throw ValidationError("record " + r.id + ": gold_answer \"" + r.gold_answer + "\" not in options");
        }
    }
}

Corpus read_corpus(std::istream& in, std::string name) {
    std::vector<Fact> facts;
    std::unordered_map<std::string, std::size_t> seen;  // id -> line
    for_each_json_line(in, [&](std::size_t line_no, const nlohmann::json& obj) {
        Fact f = make_fact(required_string(obj, "id"), required_string(obj, "text"),
                           obj.contains("source") ? required_string(obj, "source") : std::string());
        auto [it, inserted] = seen.emplace(f.id, line_no);
        if (!inserted) {
            throw ParseError(line_no, "duplicate id at lines " + std::to_string(it->second) + "," +
                                          std::to_string(line_no));
        }
        facts.push_back(std::move(f));
    });
    return Corpus(std::move(name), std::move(facts));
}

Corpus load_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_corpus(in, path.stem().string());
}

std::string fact_to_json_line(const Fact& fact) {
    ojson j;
    j["id"] = fact.id;
    j["text"] = fact.text;
    j["source"] = fact.source;
    return j.dump();
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& f : corpus) out << fact_to_json_line(f) << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    auto out = open_output(path);
    write_corpus(out, corpus);
}

std::vector<EvalRecord> read_records(std::istream& in) {
    std::vector<EvalRecord> records;
    std::unordered_map<std::string, std::size_t> seen;
    for_each_json_line(in, [&](std::size_t line_no, const nlohmann::json& obj) {
        EvalRecord r;
        r.id = required_string(obj, "id");
        r.image_ref = obj.contains("image_ref") ? required_string(obj, "image_ref") : std::string();
        r.question = required_string(obj, "question");
        if (auto it = obj.find("options"); it != obj.end()) {
            if (!it->is_array()) throw ValidationError("field \"options\" must be an array");
            for (const auto& o : *it) {
                if (!o.is_string()) throw ValidationError("options must be strings");
                r.options.push_back(o.get<std::string>());
            }
        }
        r.gold_answer = required_string(obj, "gold_answer");
        if (auto it = obj.find("gold_explanation"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) throw ValidationError("field \"gold_explanation\" must be a string");
            r.gold_explanation = it->get<std::string>();
        }
        r.dataset = obj.contains("dataset") ? required_string(obj, "dataset") : std::string();
        validate_record(r);
        auto [it, inserted] = seen.emplace(r.id, line_no);
        if (!inserted) {
            throw ParseError(line_no, "duplicate id at lines " + std::to_string(it->second) + "," +
                                          std::to_string(line_no));
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<EvalRecord> load_records(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_records(in);
}

std::string record_to_json_line(const EvalRecord& r) {
    ojson j;
    j["id"] = r.id;
    j["image_ref"] = r.image_ref;
    j["question"] = r.question;
    j["options"] = r.options;
    j["gold_answer"] = r.gold_answer;
    j["gold_explanation"] = r.gold_explanation ? ojson(*r.gold_explanation) : ojson(nullptr);
    j["dataset"] = r.dataset;
    return j.dump();
}

void write_records(std::ostream& out, const std::vector<EvalRecord>& records) {
    for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

void save_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
    auto out = open_output(path);
    write_records(out, records);
}

}  // namespace nlki
