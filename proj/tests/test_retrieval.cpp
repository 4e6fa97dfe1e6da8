#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "nlki/errors.hpp"
#include "nlki/mock_clients.hpp"
#include "nlki/query.hpp"
#include "nlki/synthetic.hpp"
#include "nlki/vector_index.hpp"

using namespace nlki;

namespace {

TokenEmbeddings rows(std::vector<std::vector<float>> v) {
    TokenEmbeddings t;
    for (auto& r : v) {
        t.tokens.push_back("t");
        t.vectors.push_back(EmbeddingVector{std::move(r)});
    }
    return t;
}

Corpus small_corpus() {
    return Corpus("small", {make_fact("f1", "a knife is used for cutting", "s"),
                            make_fact("f2", "water is a liquid", "s"), make_fact("f3", "the sky is blue", "s"),
                            make_fact("f4", "a cup holds water", "s"), make_fact("f5", "dogs like to play", "s")});
}

std::string bytes_of(const VectorIndex& idx) {
    std::ostringstream out(std::ios::binary);
    idx.write(out);
    return out.str();
}

}  // namespace

TEST_CASE("maxsim hand example") {
    const auto q = rows({{1, 0}, {0, 1}});
    const auto d = rows({{1, 0}, {0.6f, 0.8f}});
    CHECK(maxsim_score(q, d) == doctest::Approx(1.8).epsilon(1e-7));
    CHECK(maxsim_score(q, rows({{0.6f, 0.8f}, {1, 0}})) == maxsim_score(q, d));
    CHECK(maxsim_score(q, q) == doctest::Approx(2.0));
    CHECK_THROWS_AS(maxsim_score(q, TokenEmbeddings{}), ValidationError);
}

TEST_CASE("query variants") {
    VisualContext ctx;
    CHECK(build_query(QueryVariant::Q, "what is blue?", ctx) == "what is blue?");
    ctx.traditional_caption = "a beach scene";
    CHECK(build_query(QueryVariant::C_Q, "what is blue?", ctx) == "a beach scene what is blue?");
    ctx.objects = std::vector<std::string>{"dog", "ball"};
    CHECK(build_query(QueryVariant::O_Q, "q", ctx) == "dog, ball q");
    ctx.scene_graph = std::vector<SceneTriplet>{{"dog", "chases", "ball"}, {"sky", "is", "blue"}};
    CHECK(build_query(QueryVariant::SG_Q, "q", ctx) == "dog chases ball. sky is blue. q");
    CHECK(build_query(QueryVariant::ALL_Q, "q", ctx) == "a beach scene dog, ball dog chases ball. sky is blue. q");
    CHECK_THROWS_WITH_AS(build_query(QueryVariant::C_Q, "q", VisualContext{}), doctest::Contains("caption"),
                         ValidationError);
    CHECK(parse_query_variant("C_Q") == QueryVariant::C_Q);
    CHECK_THROWS_AS(parse_query_variant("X"), ValidationError);
}

TEST_CASE("single-vector index") {
    const MockEmbedder e(32, 1);
    const Corpus c = small_corpus();
    const auto idx = VectorIndex::build(c, e, RetrievalMode::Single);
    CHECK(idx.size() == 5);
    const auto hits = search_topk(idx, e, "water is a liquid", 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].fact_id == "f2");
    CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hits[0].rank == 1);
    CHECK(hits[1].rank == 2);
    const auto all = search_topk(idx, e, "water", 50);
    CHECK(all.size() == 5);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(hit_before(all[i - 1], all[i]));
    CHECK_THROWS_AS(search_topk(idx, e, "water", 0), ValidationError);
    CHECK_THROWS_AS(search_topk(idx, e, "  ", 3), ValidationError);
    CHECK_THROWS_AS(search_topk_late(idx, e, "water", 3), ValidationError);
}

TEST_CASE("ties break by ascending id") {
    const MockEmbedder e(16, 2);
    const Corpus c("dup", {make_fact("b", "same text", "s"), make_fact("a", "same text", "s"),
                           make_fact("c", "other words", "s")});
    for (const auto mode : {RetrievalMode::Single, RetrievalMode::Late}) {
        const auto hits = search(VectorIndex::build(c, e, mode), e, "same text", 2);
        CHECK(hits[0].fact_id == "a");
        CHECK(hits[1].fact_id == "b");
        CHECK(hits[0].score == hits[1].score);
    }
}

TEST_CASE("late interaction matches oracle and degenerates to dot product") {
    const MockEmbedder e(48, 3);
    const Corpus c = synthetic_corpus(50, 8);
    const auto idx = VectorIndex::build(c, e, RetrievalMode::Late);
    for (const std::string q : {"what is a knife used for", "blue water", "the dog in the park"}) {
        CHECK(search_topk_late(idx, e, q, 10) == brute_force_topk(c, e, q, 10, RetrievalMode::Late));
        const auto top = search_topk_late(idx, e, q, 1);
        double best = -1e9;
        const auto qt = e.embed_tokens(q);
        for (const auto& f : c) best = std::max(best, maxsim_score(qt, e.embed_tokens(f.text)));
        CHECK(top[0].score == best);
    }
    const Corpus words("w", {make_fact("1", "apple", "s"), make_fact("2", "river", "s"), make_fact("3", "stone", "s"),
                             make_fact("4", "cloud", "s")});
    std::vector<std::string> late_ids, single_ids;
    for (const auto& h : search(VectorIndex::build(words, e, RetrievalMode::Late), e, "river", 4))
        late_ids.push_back(h.fact_id);
    for (const auto& h : search(VectorIndex::build(words, e, RetrievalMode::Single), e, "river", 4))
        single_ids.push_back(h.fact_id);
    CHECK(late_ids == single_ids);
}

TEST_CASE("empty corpus") {
    const MockEmbedder e(8, 0);
    CHECK(brute_force_topk(Corpus{}, e, "x", 3, RetrievalMode::Single).empty());
    CHECK_THROWS_AS(VectorIndex::build(Corpus{}, e, RetrievalMode::Single), ValidationError);
}

TEST_CASE("snapshot round trip and determinism") {
    const MockEmbedder e(16, 4);
    const Corpus c = synthetic_corpus(40, 2);
    for (const auto mode : {RetrievalMode::Single, RetrievalMode::Late}) {
        const auto idx = VectorIndex::build(c, e, mode);
        const std::string bytes = bytes_of(idx);
        CHECK(bytes == bytes_of(VectorIndex::build(c, e, mode)));
        CHECK(bytes.compare(0, 8, std::string("NLKIIDX\0", 8)) == 0);
        std::istringstream in(bytes, std::ios::binary);
        const auto back = VectorIndex::read(in);
        CHECK(back.mode() == mode);
        CHECK(back.seed() == 4);
        for (const std::string q : {"a cup", "the horse runs fast", "what is it used for"})
            CHECK(search(back, e, q, 7) == search(idx, e, q, 7));

        const auto path = std::filesystem::temp_directory_path() / "nlki_test_snapshot.idx";
        idx.save(path);
        CHECK(bytes_of(VectorIndex::load(path)) == bytes);
        std::filesystem::remove(path);

        std::istringstream truncated(bytes.substr(0, bytes.size() - 3), std::ios::binary);
        CHECK_THROWS_AS(VectorIndex::read(truncated), ValidationError);
    }
    std::istringstream junk("garbage!garbage!", std::ios::binary);
    CHECK_THROWS_AS(VectorIndex::read(junk), ValidationError);
}

TEST_CASE("batch search ignores worker count") {
    const MockEmbedder e(16, 5);
    const Corpus c = synthetic_corpus(60, 5);
    const auto idx = VectorIndex::build(c, e, RetrievalMode::Late);
    std::vector<std::string> qs;
    for (int i = 0; i < 17; ++i) qs.push_back("query number " + std::to_string(i) + " about a cup");
    const auto one = search_batch(idx, e, qs, 3, 1);
    CHECK(one == search_batch(idx, e, qs, 3, 4));
    CHECK(one[5] == search(idx, e, qs[5], 3));
}
