#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/integration.hpp"

using namespace nlki;

namespace {

std::string words(const std::string& prefix, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + prefix + std::to_string(i);
    return out;
}

Prediction pred(const std::string& label) { return Prediction{label, {"A", "B", "C", "D", "E"}, {}, "fact"}; }

}  // namespace

TEST_CASE("short input is untouched") {
    const auto in = build_reader_input(words("e", 19), words("w", 12));
    CHECK(in.tokens.size() == 32);
    CHECK_FALSE(in.truncated);
    CHECK(in.text == words("e", 19) + "[SEP]" + words("w", 12));
}

TEST_CASE("95 knowledge + 10 question tokens") {
    const auto in = build_reader_input(words("k", 95), words("q", 10));
    REQUIRE(in.tokens.size() == 100);
    CHECK(in.truncated);
    CHECK(in.tokens[95] == "[SEP]");
    CHECK(in.tokens.back() == "q3");
    CHECK(in.text == words("k", 95) + "[SEP]" + words("q", 4));
    CHECK_FALSE(in.budget_below_question);
}

TEST_CASE("empty knowledge gives the bare question") {
    CHECK(build_reader_input("", "What is it?").text == "What is it?");
    CHECK(build_reader_input(" .. ", "What is it?").text == "What is it?");
    CHECK(build_k_fact_input({}, "What is it?").text == "What is it?");
}

TEST_CASE("input errors") {
    CHECK_THROWS_AS(build_reader_input("k", ""), ValidationError);
    CHECK_THROWS_AS(build_reader_input("k", "?"), ValidationError);
    CHECK_THROWS_AS(build_reader_input("k", "q", 0), ValidationError);
    CHECK(build_reader_input("k", words("q", 5), 3).budget_below_question);
}

TEST_CASE("golden truncation suite") {
    std::ifstream in(std::string(NLKI_TEST_DATA) + "/truncation_golden.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        const auto c = nlohmann::json::parse(line);
        CAPTURE(c["name"].get<std::string>());
        const auto out = build_reader_input(c["knowledge"], c["question"], c["budget"]);
        CHECK(out.tokens == c["tokens"].get<std::vector<std::string>>());
        CHECK(out.text == c["text"].get<std::string>());
        CHECK(out.truncated == c["truncated"].get<bool>());
        CHECK(out.tokens.size() <= c["budget"].get<std::size_t>());
        ++n;
    }
    CHECK(n == 50);
}

TEST_CASE("k-fact concatenation") {
    const auto one = build_k_fact_input({make_fact("a", "A knife cuts.", "s")}, "why?");
    CHECK(one.text == "A knife cuts[SEP]why?");
    std::vector<Fact> facts;
    for (int i = 0; i < 5; ++i) facts.push_back(make_fact("f" + std::to_string(i), words("w", 30) + ".", "s"));
    const auto five = build_k_fact_input(facts, "what now?");
    CHECK(five.truncated);
    CHECK(five.tokens.size() == 100);
    CHECK(five.text.find("w29. w0") != std::string::npos);
}

TEST_CASE("majority voting") {
    auto vote = [](std::vector<std::string> labels) {
        std::vector<Prediction> p;
        for (auto& l : labels) p.push_back(pred(l));
        return majority_vote(p);
    };
    CHECK(vote({"A", "A", "B", "A", "C"}).label == "A");
    CHECK(vote({"A", "A", "B", "B", "C"}).label == "A");
    CHECK(vote({"B", "A", "A", "B", "C"}).label == "B");
    CHECK(vote({"A", "B", "C", "D", "E"}).label == "A");
    CHECK(vote({"C", "B", "B"}).label == "B");
    CHECK(vote({"A", "B", "C"}).provenance == "majority(3)");
    CHECK_THROWS_AS(majority_vote({}), ValidationError);
}
