#pragma once

#include <memory>
#include <string>

#include "nlki/clients.hpp"
#include "nlki/wire.hpp"

namespace httplib {
class Server;
}

namespace nlki {

// Environment variables consulted when no base URL is configured.
inline constexpr const char* kEmbedUrlEnv = "NLKI_EMBED_URL";
inline constexpr const char* kCaptionUrlEnv = "NLKI_CAPTION_URL";
inline constexpr const char* kDetectUrlEnv = "NLKI_DETECT_URL";
inline constexpr const char* kExplainUrlEnv = "NLKI_EXPLAIN_URL";
inline constexpr const char* kAnswerUrlEnv = "NLKI_ANSWER_URL";

// Returns `configured` when non-empty, else the env var, else throws ValidationError.
std::string resolve_base_url(const std::string& configured, const char* env_var);

// POSTs JSON to <base_url><path>. Non-2xx, connection failures and timeouts
// raise TransportError after `retries` extra attempts.
class JsonServiceClient {
public:
    JsonServiceClient(std::string base_url, ClientOptions options);
    ~JsonServiceClient();

    wire::json post(const std::string& path, const wire::json& body) const;
    const std::string& base_url() const { return base_url_; }

private:
    std::string base_url_;
    ClientOptions options_;
};

class HttpEmbedder final : public TextEmbedder {
public:
    HttpEmbedder(std::string base_url, std::size_t dim, ClientOptions options = {});
    std::size_t dim() const override { return dim_; }
    EmbeddingVector embed_text(std::string_view text) const override;
    TokenEmbeddings embed_tokens(std::string_view text) const override;

private:
    JsonServiceClient client_;
    std::size_t dim_;
};

class HttpCaptioner final : public Captioner {
public:
    explicit HttpCaptioner(std::string base_url, ClientOptions options = {});
    VisualContext caption(std::string_view image_ref) const override;

private:
    JsonServiceClient client_;
};

class HttpObjectDetector final : public ObjectDetector {
public:
    explicit HttpObjectDetector(std::string base_url, ClientOptions options = {});
    std::vector<std::string> detect_objects(std::string_view image_ref) const override;

private:
    JsonServiceClient client_;
};

class HttpExplainer final : public Explainer {
public:
    explicit HttpExplainer(std::string base_url, ClientOptions options = {});
    std::string explain(std::string_view prompt, std::string_view image_ref = {}) const override;

private:
    JsonServiceClient client_;
};

class HttpReader final : public Reader {
public:
    explicit HttpReader(std::string base_url, ClientOptions options = {});
    AnswerResult answer(std::string_view text, std::string_view image_ref,
                        const std::vector<std::string>& options) const override;

private:
    JsonServiceClient client_;
};

// Backends served by register_service_routes. Null members are not routed.
struct ServiceBackends {
    const TextEmbedder* embedder = nullptr;
    const Captioner* captioner = nullptr;
    const ObjectDetector* detector = nullptr;
    const Explainer* explainer = nullptr;
    const Reader* reader = nullptr;
};

void register_service_routes(httplib::Server& server, const ServiceBackends& backends);

}  // namespace nlki
