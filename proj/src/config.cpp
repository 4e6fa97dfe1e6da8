#include "nlki/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "nlki/errors.hpp"

namespace nlki {

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node) return;
    if (!node.IsMap()) throw ValidationError("config key " + (path.empty() ? "<root>" : path) + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ValidationError("unknown config key " + join_path(path, key));
    }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
    const YAML::Node node = parent[key];
    if (!node) return;
    try {
        out = node.as<T>();
    } catch (const YAML::Exception&) {
        throw ValidationError("config key " + join_path(path, key) + " has an invalid value");
    }
}

template <typename T, typename Parse>
void read_enum(const YAML::Node& parent, const char* key, const std::string& path, T& out, Parse parse) {
    std::string text;
    read(parent, key, path, text);
    if (text.empty()) return;
    try {
        out = parse(text);
    } catch (const ValidationError& e) {
        throw ValidationError("config key " + join_path(path, key) + ": " + e.what());
    }
}

void apply_override(YAML::Node& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override \"" + assignment + "\" must be key=value");
    const std::string key = assignment.substr(0, eq);
    const YAML::Node value = YAML::Load(assignment.substr(eq + 1));
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    // Walk with fresh handles; yaml-cpp node assignment rebinds, so recurse by copy.
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (!next) {
            chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
            next = chain.back()[parts[i]];
        }
        chain.push_back(next);
    }
    chain.back()[parts.back()] = value;
}

}  // namespace

KnowledgeMode parse_knowledge_mode(std::string_view name) {
    if (name == "explanation") return KnowledgeMode::Explanation;
    if (name == "facts") return KnowledgeMode::Facts;
    if (name == "majority") return KnowledgeMode::Majority;
    if (name == "none") return KnowledgeMode::None;
    throw ValidationError("unknown knowledge mode \"" + std::string(name) + "\" (explanation|facts|majority|none)");
}

std::string_view to_string(KnowledgeMode m) {
    switch (m) {
        case KnowledgeMode::Explanation: return "explanation";
        case KnowledgeMode::Facts: return "facts";
        case KnowledgeMode::Majority: return "majority";
        case KnowledgeMode::None: return "none";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (workers == 0) throw ValidationError("config key workers must be >= 1");
    if (k == 0) throw ValidationError("config key retrieval.k must be >= 1");
    if (token_budget == 0) throw ValidationError("config key integration.token_budget must be >= 1");
    if (vote_k == 0) throw ValidationError("config key integration.vote_k must be >= 1");
    if (clients.embed_dim == 0) throw ValidationError("config key clients.embed_dim must be >= 1");
    if (clients.options.timeout_s <= 0) throw ValidationError("config key clients.timeout_s must be positive");
    if (clients.options.retries < 0) throw ValidationError("config key clients.retries must be >= 0");
    if (clients.embed_topic_weight < 0.0) throw ValidationError("config key clients.embed_topic_weight must be >= 0");
    if (clients.mock_latency_ms < 0) throw ValidationError("config key clients.mock_latency_ms must be >= 0");
    try {
        loss.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

PipelineConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
    YAML::Node root;
    try {
        root = yaml_text.empty() ? YAML::Node(YAML::NodeType::Map) : YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ValidationError(std::string("config is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& o : overrides) apply_override(root, o);

    PipelineConfig c;
    reject_unknown(root, "", {"seed", "workers", "clients", "retrieval", "prompt", "integration", "loss"});
    read(root, "seed", "", c.seed);
    read(root, "workers", "", c.workers);

    if (const YAML::Node n = root["clients"]) {
        reject_unknown(n, "clients", {"mode", "urls", "timeout_s", "retries", "embed_dim", "embed_topics", "embed_topic_weight", "mock_latency_ms"});
        read_enum(n, "mode", "clients", c.clients.mode, [](const std::string& s) {
            if (s == "mock") return ClientMode::Mock;
            if (s == "http") return ClientMode::Http;
            throw ValidationError("expected mock|http, got \"" + s + "\"");
        });
        read(n, "timeout_s", "clients", c.clients.options.timeout_s);
        read(n, "retries", "clients", c.clients.options.retries);
        read(n, "embed_dim", "clients", c.clients.embed_dim);
        read(n, "embed_topics", "clients", c.clients.embed_topics);
        read(n, "embed_topic_weight", "clients", c.clients.embed_topic_weight);
        read(n, "mock_latency_ms", "clients", c.clients.mock_latency_ms);
        if (const YAML::Node u = n["urls"]) {
            reject_unknown(u, "clients.urls", {"embed", "caption", "detect", "explain", "answer"});
            read(u, "embed", "clients.urls", c.clients.embed_url);
            read(u, "caption", "clients.urls", c.clients.caption_url);
            read(u, "detect", "clients.urls", c.clients.detect_url);
            read(u, "explain", "clients.urls", c.clients.explain_url);
            read(u, "answer", "clients.urls", c.clients.answer_url);
        }
    }
    if (const YAML::Node n = root["retrieval"]) {
        reject_unknown(n, "retrieval", {"mode", "k", "query_variant", "corpus", "index", "head"});
        read_enum(n, "mode", "retrieval", c.retrieval_mode, parse_retrieval_mode);
        read(n, "k", "retrieval", c.k);
        read_enum(n, "query_variant", "retrieval", c.query_variant, parse_query_variant);
        read(n, "corpus", "retrieval", c.corpus_path);
        read(n, "index", "retrieval", c.index_path);
        read(n, "head", "retrieval", c.head_path);
    }
    if (const YAML::Node n = root["prompt"]) {
        reject_unknown(n, "prompt", {"type", "forbidden_words"});
        read_enum(n, "type", "prompt", c.prompt_type, parse_prompt_type);
        if (const YAML::Node f = n["forbidden_words"]) {
            if (!f.IsMap()) throw ValidationError("config key prompt.forbidden_words must map dataset -> list");
            for (const auto& kv : f) {
                const auto dataset = kv.first.as<std::string>();
                try {
                    c.forbidden_words[dataset] = kv.second.as<std::vector<std::string>>();
                } catch (const YAML::Exception&) {
                    throw ValidationError("config key prompt.forbidden_words." + dataset + " must be a list of strings");
                }
            }
        }
    }
    if (const YAML::Node n = root["integration"]) {
        reject_unknown(n, "integration", {"knowledge", "token_budget", "vote_k"});
        read_enum(n, "knowledge", "integration", c.knowledge, parse_knowledge_mode);
        read(n, "token_budget", "integration", c.token_budget);
        read(n, "vote_k", "integration", c.vote_k);
    }
    if (const YAML::Node n = root["loss"]) {
        reject_unknown(n, "loss", {"kind", "alpha", "beta", "gamma", "q", "lambda", "warmup_epochs"});
        read_enum(n, "kind", "loss", c.loss.kind, parse_loss_kind);
        read(n, "alpha", "loss", c.loss.alpha);
        read(n, "beta", "loss", c.loss.beta);
        read(n, "gamma", "loss", c.loss.gamma);
        read(n, "q", "loss", c.loss.q);
        read(n, "lambda", "loss", c.loss.lambda);
        read(n, "warmup_epochs", "loss", c.loss.warmup_epochs);
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

}  // namespace nlki
