#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/metrics.hpp"
#include "nlki/mock_clients.hpp"
#include "nlki/synthetic.hpp"

using namespace nlki;

TEST_CASE("hand-computed values") {
    CHECK(bleu_k("the cat sat", "the cat sat on the mat", 1) == doctest::Approx(0.3678794412).epsilon(1e-9));
    CHECK(rouge_n("a cat sat", "the cat sat down", 1) == doctest::Approx(0.5714285714).epsilon(1e-9));
    for (const char* s : {"the cat sat on the mat", "dog", "a b"}) {
        for (int k = 1; k <= 4; ++k) CHECK(bleu_k(s, s, k) == doctest::Approx(1.0));
        CHECK(rouge_n(s, s, 1) == 1.0);
        CHECK(rouge_n(s, s, 2) == 1.0);
        CHECK(rouge_l(s, s) == 1.0);
    }
    CHECK(bleu_k("red blue green", "cat dog", 2) < 1e-6);
    CHECK(rouge_n("red blue", "cat dog", 1) == 0.0);
    CHECK(rouge_l("red blue", "cat dog") == 0.0);
    CHECK(bleu_k("", "cat", 1) == 0.0);
}

TEST_CASE("independent oracle values") {
    std::ifstream in(std::string(NLKI_TEST_DATA) + "/metric_oracle.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        const auto c = nlohmann::json::parse(line);
        const std::string a = c["candidate"], b = c["reference"];
        CAPTURE(a);
        CAPTURE(b);
        CHECK(bleu_k(a, b, 1) == doctest::Approx(c["bleu1"].get<double>()).epsilon(1e-9));
        CHECK(bleu_k(a, b, 2) == doctest::Approx(c["bleu2"].get<double>()).epsilon(1e-9));
        CHECK(bleu_k(a, b, 3) == doctest::Approx(c["bleu3"].get<double>()).epsilon(1e-9));
        CHECK(bleu_k(a, b, 4) == doctest::Approx(c["bleu4"].get<double>()).epsilon(1e-9));
        CHECK(rouge_n(a, b, 1) == doctest::Approx(c["rouge1"].get<double>()).epsilon(1e-9));
        CHECK(rouge_n(a, b, 2) == doctest::Approx(c["rouge2"].get<double>()).epsilon(1e-9));
        CHECK(rouge_l(a, b) == doctest::Approx(c["rougeL"].get<double>()).epsilon(1e-9));
    }
    CHECK(n > 300);
}

TEST_CASE("cosine and answer matching") {
    CHECK(cosine_sim(EmbeddingVector{{1, 0}}, EmbeddingVector{{0.6f, 0.8f}}) == doctest::Approx(0.6));
    CHECK(cosine_sim(EmbeddingVector{{1, 0}}, EmbeddingVector{{0, 1}}) == 0.0);
    CHECK(exact_match("Dog ", "dog"));
    CHECK_FALSE(exact_match("dogs", "dog"));
    const MockEmbedder e(64, 1);
    CHECK(cosine_accuracy("red ball", "red ball", e));
    CHECK_FALSE(cosine_accuracy("sofa", "couch", e));
}

TEST_CASE("retrieval report") {
    std::vector<EvalRecord> recs(2);
    recs[0] = {"r1", "i", "q", {}, "a", "the cat sat on the mat", "cric"};
    recs[1] = {"r2", "i", "q", {}, "a", "water is a liquid", "cric"};
    const std::vector<std::vector<std::string>> cands = {
        {"a dog ran", "the cat sat on the mat", "x"}, {"water is a liquid", "fire is hot", "y"}};
    const MockEmbedder e(32, 1);
    const auto r1 = retrieval_report(recs, cands, 1, MetricSet{}, &e);
    CHECK(*r1.rl == doctest::Approx((rouge_l("a dog ran", recs[0].gold_explanation.value()) * 100 + 100) / 2));
    const auto r5 = retrieval_report(recs, cands, 5, MetricSet{}, &e);
    CHECK(*r5.rl == doctest::Approx(100.0));
    CHECK(*r5.cosine == doctest::Approx(100.0).epsilon(1e-5));
    const auto mean = retrieval_report(recs, cands, 2, MetricSet{}, &e, Aggregation::Mean);
    CHECK(*mean.rl < *retrieval_report(recs, cands, 2, MetricSet{}, &e).rl);
    CHECK_THROWS_AS(retrieval_report(recs, {}, 1, MetricSet{}, &e), ValidationError);
    CHECK_THROWS_AS(retrieval_report(recs, cands, 0, MetricSet{}, &e), ValidationError);
    const auto table = report_table({{"@5", r5}});
    CHECK(table.find("R-L@5") != std::string::npos);
}

TEST_CASE("hand-scored ten record set") {
    // Per-record B-1 and R-1 of the single candidate, averaged by hand.
    std::vector<EvalRecord> recs;
    std::vector<std::vector<std::string>> cands;
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"a b c d", "a b c d"}, {"a b", "a b c d"}, {"x y", "a b"},     {"a b c d", "a b"}, {"a", "a"},
        {"a x", "a y"},         {"b a", "a b"},     {"a a", "a b"},     {"c", "a b c"},     {"a b c", "c b a"}};
    // R-1 F1 per pair: 1, 2/3, 0, 2/3, 1, 1/2, 1, 1/2, 1/2, 1  -> mean 0.68333
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        recs.push_back({"r" + std::to_string(i), "i", "q", {}, "a", pairs[i].second, "cric"});
        cands.push_back({pairs[i].first});
    }
    MetricSet m;
    m.cosine = false;
    const auto r = retrieval_report(recs, cands, 1, m, nullptr);
    CHECK(*r.r1 == doctest::Approx(68.3333333).epsilon(1e-6));
    CHECK_FALSE(r.cosine);
}

TEST_CASE("answer report with an echo reader is perfect") {
    const Corpus c = synthetic_corpus(20, 1);
    const auto recs = synthetic_records(25, c, 2);
    std::map<std::string, std::string> gold;
    for (const auto& r : recs) gold[r.image_ref] = r.gold_answer;
    const EchoReader reader(gold);
    std::vector<std::string> preds;
    for (const auto& r : recs) preds.push_back(reader.answer(r.question, r.image_ref, r.options).label);
    const MockEmbedder e(32, 1);
    const auto rep = answer_report(recs, preds, &e);
    CHECK(*rep.exact_match == 100.0);
    CHECK(*rep.threshold_accuracy == 100.0);
}
