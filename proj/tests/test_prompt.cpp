#include <doctest.h>

#include "nlki/errors.hpp"
#include "nlki/prompt.hpp"
#include "prompt_fixture.hpp"

using namespace nlki;
using nlki::testing::kitchen_inputs;
using nlki::testing::read_file;

namespace {

std::string golden(const std::string& name) { return read_file(std::string(NLKI_TEST_DATA) + "/prompts/" + name); }

}  // namespace

TEST_CASE("types 0-6 match pinned templates") {
    for (int t = 0; t <= 6; ++t) {
        auto in = kitchen_inputs();
        if (t == 0) in.gold_label = "cutting";
        const auto type = static_cast<PromptType>(t);
        CAPTURE(t);
        CHECK(assemble_prompt(type, in) == golden("type" + std::to_string(t) + ".txt"));
    }
}

TEST_CASE("type 6 is type 5 without the facts block") {
    const auto in = kitchen_inputs();
    const std::string t5 = assemble_prompt(PromptType::Type5, in);
    const std::string t6 = assemble_prompt(PromptType::Type6, in);
    const std::string block = "Retrieved Facts (RF):\nFact: A knife is used for cutting.\nFact: Vegetables are food.\n";
    const auto pos = t5.find(block);
    REQUIRE(pos != std::string::npos);
    CHECK(t5.substr(0, pos) + t5.substr(pos + block.size()) == t6);
    CHECK(t5.find("GT-L") == std::string::npos);
}

TEST_CASE("nli dataset extends the forbidden list") {
    auto in = kitchen_inputs();
    in.question = "Two men are preparing food.";
    in.dataset = "esnlive";
    CHECK(assemble_prompt(PromptType::Type6, in) == golden("type6_esnlive.txt"));
    CHECK(is_nli_dataset("e-SNLI-VE"));
    CHECK_FALSE(is_nli_dataset("cric"));
}

TEST_CASE("component errors") {
    auto in = kitchen_inputs();
    CHECK_THROWS_WITH_AS(assemble_prompt(PromptType::Type0, in), doctest::Contains("GT-L"), ValidationError);
    in.gold_label = "cutting";
    CHECK_THROWS_WITH_AS(assemble_prompt(PromptType::Type5, in), doctest::Contains("gold label"), ValidationError);
    in = kitchen_inputs();
    in.context.dense_caption.reset();
    CHECK_THROWS_WITH_AS(assemble_prompt(PromptType::Type2, in), doctest::Contains("DC"), ValidationError);
    in = kitchen_inputs();
    in.facts.clear();
    CHECK_THROWS_WITH_AS(assemble_prompt(PromptType::Type1, in), doctest::Contains("RF"), ValidationError);
    CHECK_NOTHROW(assemble_prompt(PromptType::Type6, in));
    CHECK_THROWS_AS(assemble_prompt(PromptType::Type7, in), ValidationError);
    CHECK(type7_task_prompt("why?") == "<EXPLAIN_VQA>why?");
}

TEST_CASE("prompt type parsing") {
    CHECK(parse_prompt_type("5") == PromptType::Type5);
    CHECK(parse_prompt_type("Type-0") == PromptType::Type0);
    CHECK(parse_prompt_type("type7") == PromptType::Type7);
    CHECK_THROWS_AS(parse_prompt_type("8"), ValidationError);
}

TEST_CASE("output filter") {
    const auto ok = filter_output("the orange behind the box has more vitamin C", "cric");
    REQUIRE(std::holds_alternative<ExplanationText>(ok));
    CHECK(std::get<ExplanationText>(ok).word_count == 9);
    CHECK(std::get<ExplanationText>(ok).length_warning);

    const auto bad = filter_output("the Image Description shows a dog", "cric");
    REQUIRE(std::holds_alternative<Rejection>(bad));
    CHECK(std::get<Rejection>(bad).matched == "image description");

    CHECK(std::holds_alternative<Rejection>(filter_output("this is an entailment", "esnlive")));
    CHECK(std::get<Rejection>(filter_output("a clear contradiction", "e-SNLI-VE")).matched == "contradiction");
    CHECK(std::holds_alternative<ExplanationText>(filter_output("this is an entailment", "cric")));
    CHECK(std::holds_alternative<Rejection>(filter_output("   ", "cric")));

    const ForbiddenWords custom(std::map<std::string, std::vector<std::string>>{{"cric", {"banana"}}});
    CHECK(std::holds_alternative<Rejection>(filter_output("a banana", "cric", PromptType::Type5, custom)));
    CHECK(std::holds_alternative<ExplanationText>(filter_output("image description", "cric", PromptType::Type5, custom)));
}
