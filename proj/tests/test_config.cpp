#include <doctest.h>

#include "nlki/config.hpp"
#include "nlki/errors.hpp"

using namespace nlki;

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.seed == 0);
    CHECK(c.workers == 1);
    CHECK(c.clients.mode == ClientMode::Mock);
    CHECK(c.retrieval_mode == RetrievalMode::Late);
    CHECK(c.token_budget == 100);
    CHECK(c.prompt_type == PromptType::Type5);
}

TEST_CASE("nested keys") {
    const auto c = parse_config(R"(
seed: 42
workers: 4
clients:
  mode: http
  timeout_s: 5
  urls:
    embed: http://localhost:9000
retrieval:
  mode: single
  k: 5
  query_variant: C_Q
prompt:
  type: 6
  forbidden_words:
    cric: [foo, bar]
integration:
  knowledge: majority
  vote_k: 3
loss:
  kind: GCE
  q: 0.5
)");
    CHECK(c.seed == 42);
    CHECK(c.workers == 4);
    CHECK(c.clients.mode == ClientMode::Http);
    CHECK(c.clients.embed_url == "http://localhost:9000");
    CHECK(c.retrieval_mode == RetrievalMode::Single);
    CHECK(c.k == 5);
    CHECK(c.query_variant == QueryVariant::C_Q);
    CHECK(c.prompt_type == PromptType::Type6);
    CHECK(c.forbidden_words.at("cric") == std::vector<std::string>{"foo", "bar"});
    CHECK(c.knowledge == KnowledgeMode::Majority);
    CHECK(c.vote_k == 3);
    CHECK(c.loss.kind == LossKind::GCE);
    CHECK(c.loss.q == 0.5);
}

TEST_CASE("embedder topic keys") {
    const auto c = parse_config("clients:\n  embed_topics: 8\n  embed_topic_weight: 1.5\n");
    CHECK(c.clients.embed_topics == 8);
    CHECK(c.clients.embed_topic_weight == 1.5);
    CHECK_THROWS_AS(parse_config("clients:\n  embed_topic_weight: -1\n"), ValidationError);
}

TEST_CASE("errors name the key") {
    CHECK_THROWS_WITH_AS(parse_config("retrieval:\n  kk: 3\n"), doctest::Contains("retrieval.kk"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("sede: 1\n"), doctest::Contains("sede"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("retrieval:\n  k: many\n"), doctest::Contains("retrieval.k"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("retrieval:\n  k: 0\n"), doctest::Contains("retrieval.k"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("clients:\n  mode: grpc\n"), doctest::Contains("clients.mode"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("loss:\n  q: 2\n"), doctest::Contains("q"), ValidationError);
    CHECK_THROWS_AS(parse_config("a: [unclosed\n"), ValidationError);
}

TEST_CASE("overrides") {
    const auto c = parse_config("retrieval:\n  k: 3\n", {"retrieval.k=7", "seed=9", "loss.kind=SCE"});
    CHECK(c.k == 7);
    CHECK(c.seed == 9);
    CHECK(c.loss.kind == LossKind::SCE);
    CHECK_THROWS_WITH_AS(parse_config("", {"retrieval.nope=1"}), doctest::Contains("retrieval.nope"),
                         ValidationError);
    CHECK_THROWS_AS(parse_config("", {"novalue"}), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ValidationError);
}
