#include "nlki/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <thread>

#include "nlki/errors.hpp"
#include "nlki/http_clients.hpp"
#include "nlki/mock_clients.hpp"
#include "nlki/prompt.hpp"
#include "nlki/query.hpp"
#include "nlki/rng.hpp"
#include "nlki/wire.hpp"

namespace nlki {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
auto timed(double& slot, F&& f) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
        f();
        slot = ms_since(start);
    } else {
        auto result = f();
        slot = ms_since(start);
        return result;
    }
}

}  // namespace

ClientSet make_clients(const PipelineConfig& config) {
    ClientSet set;
    const auto& cc = config.clients;
    if (cc.mode == ClientMode::Mock) {
        const std::chrono::milliseconds latency(cc.mock_latency_ms);
        set.base_embedder = std::make_unique<MockEmbedder>(cc.embed_dim, derive_seed(config.seed, 1), default_tokenizer(),
                                                           TopicNoise{cc.embed_topics, cc.embed_topic_weight});
        set.captioner = std::make_unique<MockCaptioner>(derive_seed(config.seed, 2), latency);
        set.detector = std::make_unique<MockObjectDetector>(derive_seed(config.seed, 2), latency);
        set.explainer = std::make_unique<MockExplainer>(derive_seed(config.seed, 3), latency);
        set.reader = std::make_unique<MockReader>(derive_seed(config.seed, 4), latency);
    } else {
        set.base_embedder =
            std::make_unique<HttpEmbedder>(resolve_base_url(cc.embed_url, kEmbedUrlEnv), cc.embed_dim, cc.options);
        set.captioner = std::make_unique<HttpCaptioner>(resolve_base_url(cc.caption_url, kCaptionUrlEnv), cc.options);
        set.detector =
            std::make_unique<HttpObjectDetector>(resolve_base_url(cc.detect_url, kDetectUrlEnv), cc.options);
        set.explainer = std::make_unique<HttpExplainer>(resolve_base_url(cc.explain_url, kExplainUrlEnv), cc.options);
        set.reader = std::make_unique<HttpReader>(resolve_base_url(cc.answer_url, kAnswerUrlEnv), cc.options);
    }
    if (!config.head_path.empty()) {
        auto head = ProjectionHead::load(config.head_path);
        if (head.in_dim != set.base_embedder->dim())
            throw ValidationError("config key retrieval.head: head input dim " + std::to_string(head.in_dim) +
                                  " does not match embed_dim " + std::to_string(set.base_embedder->dim()));
        set.projected = std::make_unique<ProjectedEmbedder>(*set.base_embedder, std::move(head));
    }
    return set;
}

double StageTiming::max_stage() const {
    return std::max({caption_ms, detect_ms, retrieve_ms, explain_ms, integrate_ms, answer_ms});
}

double StageTiming::stage_sum() const {
    return caption_ms + detect_ms + retrieve_ms + explain_ms + integrate_ms + answer_ms;
}

std::string answer_output_json(const AnswerOutput& out) {
    wire::json j;
    j["id"] = out.id;
    j["prediction"] = out.prediction;
    j["options"] = out.options;
    j["scores"] = out.scores;
    wire::json hits = wire::json::array();
    for (const auto& h : out.hits) hits.push_back({{"fact_id", h.fact_id}, {"score", h.score}, {"rank", h.rank}});
    j["hits"] = std::move(hits);
    j["explanation"] = out.explanation ? wire::json(*out.explanation) : wire::json(nullptr);
    if (out.rejected) j["rejected"] = *out.rejected;
    j["reader_text"] = out.reader_text;
    j["truncated"] = out.truncated;
    j["provenance"] = out.provenance;
    return j.dump();
}

Pipeline::Pipeline(const PipelineConfig& config, const ClientSet& clients, const Corpus& corpus,
                   const VectorIndex& index)
    : config_(&config), clients_(&clients), corpus_(&corpus), index_(&index), forbidden_(config.forbidden_words) {
    if (index.size() != corpus.size()) throw ValidationError("index and corpus sizes differ");
    if (index.dim() != clients.embedder().dim())
        throw ValidationError("index dim " + std::to_string(index.dim()) + " does not match embedder dim " +
                              std::to_string(clients.embedder().dim()));
}

AnswerOutput Pipeline::run(const EvalRecord& record, StageTiming* timing, bool concurrent) const {
    validate_record(record);
    const auto& cfg = *config_;
    StageTiming t;
    t.concurrent = concurrent;
    const auto wall_start = Clock::now();

    VisualContext ctx;
    std::vector<std::string> objects;
    if (concurrent) {
        auto detect = std::async(std::launch::async, [&] {
            return timed(t.detect_ms, [&] { return clients_->detector->detect_objects(record.image_ref); });
        });
        ctx = timed(t.caption_ms, [&] { return clients_->captioner->caption(record.image_ref); });
        objects = detect.get();
    } else {
        ctx = timed(t.caption_ms, [&] { return clients_->captioner->caption(record.image_ref); });
        objects = timed(t.detect_ms, [&] { return clients_->detector->detect_objects(record.image_ref); });
    }
    ctx.objects = std::move(objects);

    AnswerOutput out;
    out.id = record.id;
    out.options = record.options;

    const std::size_t depth = cfg.knowledge == KnowledgeMode::Majority ? std::max(cfg.k, cfg.vote_k) : cfg.k;
    std::vector<Fact> facts;
    timed(t.retrieve_ms, [&] {
        const std::string query = build_query(cfg.query_variant, record.question, ctx);
        out.hits = search(*index_, clients_->embedder(), query, depth);
        for (const auto& h : out.hits) facts.push_back(*corpus_->find(h.fact_id));
    });
    std::vector<Fact> top_k(facts.begin(), facts.begin() + std::min(cfg.k, facts.size()));

    std::string knowledge;
    if (cfg.knowledge == KnowledgeMode::Explanation) {
        timed(t.explain_ms, [&] {
            std::string raw;
            if (cfg.prompt_type == PromptType::Type7) {
                raw = clients_->explainer->explain(type7_task_prompt(record.question), record.image_ref);
            } else {
                PromptInputs in{record.question, ctx, top_k, std::nullopt, record.dataset};
                if (cfg.prompt_type == PromptType::Type0) in.gold_label = record.gold_answer;
                raw = clients_->explainer->explain(assemble_prompt(cfg.prompt_type, in, forbidden_), {});
            }
            const auto filtered = filter_output(raw, record.dataset, cfg.prompt_type, forbidden_);
            if (const auto* e = std::get_if<ExplanationText>(&filtered)) {
                out.explanation = e->text;
                knowledge = e->text;
            } else {
                out.rejected = std::get<Rejection>(filtered).matched;
            }
        });
    }

    if (cfg.knowledge == KnowledgeMode::Majority) {
        std::vector<ReaderInput> inputs;
        timed(t.integrate_ms, [&] {
            const std::size_t n = std::min(cfg.vote_k, facts.size());
            for (std::size_t i = 0; i < n; ++i)
                inputs.push_back(build_k_fact_input({facts[i]}, record.question, cfg.token_budget));
            if (inputs.empty()) inputs.push_back(build_reader_input("", record.question, cfg.token_budget));
        });
        timed(t.answer_ms, [&] {
            std::vector<Prediction> preds;
            for (const auto& in : inputs) {
                auto r = clients_->reader->answer(in.text, record.image_ref, record.options);
                preds.push_back({r.label, record.options, r.scores, "fact"});
            }
            const Prediction winner = majority_vote(preds);
            out.prediction = winner.label;
            out.scores = winner.scores;
            out.provenance = winner.provenance;
        });
        out.reader_text = inputs.front().text;
        out.truncated = std::any_of(inputs.begin(), inputs.end(), [](const auto& in) { return in.truncated; });
    } else {
        ReaderInput input;
        timed(t.integrate_ms, [&] {
            if (cfg.knowledge == KnowledgeMode::Facts)
                input = build_k_fact_input(top_k, record.question, cfg.token_budget);
            else
                input = build_reader_input(knowledge, record.question, cfg.token_budget);
        });
        timed(t.answer_ms, [&] {
            auto r = clients_->reader->answer(input.text, record.image_ref, record.options);
            out.prediction = r.label;
            out.scores = r.scores;
        });
        out.reader_text = input.text;
        out.truncated = input.truncated;
        out.provenance = std::string(to_string(cfg.knowledge));
    }

    t.total_ms = concurrent ? ms_since(wall_start) : t.stage_sum();
    if (timing) *timing = t;
    return out;
}

std::vector<AnswerOutput> Pipeline::run_all(const std::vector<EvalRecord>& records, std::size_t workers) const {
    std::vector<AnswerOutput> results(records.size());
    workers = std::max<std::size_t>(1, std::min(workers, records.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < records.size(); ++i) results[i] = run(records[i]);
        return results;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < records.size(); i += workers) results[i] = run(records[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

VectorIndex open_index(const PipelineConfig& config, const Corpus& corpus, const TextEmbedder& embedder) {
    if (!config.index_path.empty()) {
        auto index = VectorIndex::load(config.index_path);
        if (index.mode() != config.retrieval_mode)
            throw ValidationError("config key retrieval.mode is " + std::string(to_string(config.retrieval_mode)) +
                                  " but the index was built in " + std::string(to_string(index.mode())) + " mode");
        if (index.seed() != embedder.seed())
            throw ValidationError("index was built with a different embedder (seed mismatch)");
        return index;
    }
    return VectorIndex::build(corpus, embedder, config.retrieval_mode);
}

}  // namespace nlki
