#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/losses.hpp"
#include "nlki/prompt.hpp"
#include "nlki/query.hpp"
#include "nlki/vector_index.hpp"

namespace nlki {

enum class ClientMode { Mock, Http };

struct ClientConfig {
    ClientMode mode = ClientMode::Mock;
    std::string embed_url;
    std::string caption_url;
    std::string detect_url;
    std::string explain_url;
    std::string answer_url;
    ClientOptions options;
    std::size_t embed_dim = 64;
    std::size_t embed_topics = 0;       // mock embedder topic structure, 0 = off
    double embed_topic_weight = 0.0;
    int mock_latency_ms = 0;
};

// How retrieved knowledge reaches the reader.
enum class KnowledgeMode { Explanation, Facts, Majority, None };

KnowledgeMode parse_knowledge_mode(std::string_view name);
std::string_view to_string(KnowledgeMode m);

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    ClientConfig clients;

    RetrievalMode retrieval_mode = RetrievalMode::Late;
    std::size_t k = 1;
    QueryVariant query_variant = QueryVariant::Q;
    std::string corpus_path;
    std::string index_path;
    std::string head_path;

    PromptType prompt_type = PromptType::Type5;
    std::map<std::string, std::vector<std::string>> forbidden_words;

    KnowledgeMode knowledge = KnowledgeMode::Explanation;
    std::size_t token_budget = 100;
    std::size_t vote_k = 5;

    LossConfig loss;

    void validate() const;
};

// Parses nested YAML. Unknown keys and bad values raise ValidationError
// naming the dotted key path. `overrides` are "dotted.key=value" pairs
// applied before parsing.
PipelineConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});
PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace nlki
