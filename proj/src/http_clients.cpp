#include "nlki/http_clients.hpp"

#include <cstdlib>

#include <httplib.h>

#include "nlki/errors.hpp"

namespace nlki {

std::string resolve_base_url(const std::string& configured, const char* env_var) {
    if (!configured.empty()) return configured;
    if (const char* v = std::getenv(env_var); v != nullptr && *v != '\0') return v;
    throw ValidationError(std::string("no base URL configured and ") + env_var + " is unset");
}

JsonServiceClient::JsonServiceClient(std::string base_url, ClientOptions options)
    : base_url_(std::move(base_url)), options_(options) {
    if (options_.timeout_s <= 0.0) throw ValidationError("client timeout must be positive");
    if (options_.retries < 0) throw ValidationError("client retries must be >= 0");
}

JsonServiceClient::~JsonServiceClient() = default;

wire::json JsonServiceClient::post(const std::string& path, const wire::json& body) const {
    httplib::Client client(base_url_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(options_.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        auto res = client.Post(path, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            std::string detail = res->body;
            try {
                auto j = wire::json::parse(res->body);
                if (j.is_object() && j.contains("error") && j["error"].is_string()) detail = j["error"];
            } catch (const wire::json::exception&) {
            }
            last_error = "HTTP " + std::to_string(res->status) + ": " + detail;
            continue;
        }
        return wire::parse_body(res->body);
    }
    throw TransportError(base_url_ + path + " failed: " + last_error);
}

HttpEmbedder::HttpEmbedder(std::string base_url, std::size_t dim, ClientOptions options)
    : client_(std::move(base_url), options), dim_(dim) {
    if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

EmbeddingVector HttpEmbedder::embed_text(std::string_view text) const {
    if (text.empty()) throw ValidationError("empty input");
    auto v = wire::parse_embedding(client_.post("/embed", wire::to_json(wire::TextRequest{std::string(text)})));
    check_dim(v, dim_);
    normalize(v);
    return v;
}

TokenEmbeddings HttpEmbedder::embed_tokens(std::string_view text) const {
    if (text.empty()) throw ValidationError("empty input");
    auto t = wire::parse_token_embeddings(
        client_.post("/embed_tokens", wire::to_json(wire::TextRequest{std::string(text)})));
    if (t.empty()) throw ContractError("embed_tokens returned no tokens");
    for (auto& v : t.vectors) {
        check_dim(v, dim_);
        normalize(v);
    }
    return t;
}

HttpCaptioner::HttpCaptioner(std::string base_url, ClientOptions options) : client_(std::move(base_url), options) {}

VisualContext HttpCaptioner::caption(std::string_view image_ref) const {
    return wire::parse_visual_context(
        client_.post("/caption", wire::to_json(wire::ImageRequest{std::string(image_ref)})));
}

HttpObjectDetector::HttpObjectDetector(std::string base_url, ClientOptions options)
    : client_(std::move(base_url), options) {}

std::vector<std::string> HttpObjectDetector::detect_objects(std::string_view image_ref) const {
    return wire::parse_objects(client_.post("/detect", wire::to_json(wire::ImageRequest{std::string(image_ref)})));
}

HttpExplainer::HttpExplainer(std::string base_url, ClientOptions options) : client_(std::move(base_url), options) {}

std::string HttpExplainer::explain(std::string_view prompt, std::string_view image_ref) const {
    return wire::parse_explanation(client_.post(
        "/explain", wire::to_json(wire::ExplainRequest{std::string(prompt), std::string(image_ref)})));
}

HttpReader::HttpReader(std::string base_url, ClientOptions options) : client_(std::move(base_url), options) {}

AnswerResult HttpReader::answer(std::string_view text, std::string_view image_ref,
                                const std::vector<std::string>& options) const {
    if (options.empty()) throw ValidationError("answer requires at least one option");
    auto r = wire::parse_answer(client_.post(
        "/answer", wire::to_json(wire::AnswerRequest{std::string(text), std::string(image_ref), options})));
    if (r.scores.size() != options.size()) throw ContractError("answer scores do not match option count");
    return r;
}

namespace {

template <typename Handler>
void route(httplib::Server& server, const char* path, Handler handler) {
    server.Post(path, [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto body = wire::parse_body(req.body);
            res.set_content(handler(body).dump(), "application/json");
        } catch (const ContractError& e) {
            res.status = 400;
            res.set_content(wire::error_json(e.what()).dump(), "application/json");
        } catch (const ValidationError& e) {
            res.status = 400;
            res.set_content(wire::error_json(e.what()).dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(wire::error_json(e.what()).dump(), "application/json");
        }
    });
}

}  // namespace

void register_service_routes(httplib::Server& server, const ServiceBackends& b) {
    if (b.embedder) {
        const TextEmbedder* e = b.embedder;
        route(server, "/embed", [e](const wire::json& j) {
            return wire::to_json(e->embed_text(wire::parse_text_request(j).text));
        });
        route(server, "/embed_tokens", [e](const wire::json& j) {
            return wire::to_json(e->embed_tokens(wire::parse_text_request(j).text));
        });
    }
    if (b.captioner) {
        const Captioner* c = b.captioner;
        route(server, "/caption", [c](const wire::json& j) {
            return wire::to_json(c->caption(wire::parse_image_request(j).image_ref));
        });
    }
    if (b.detector) {
        const ObjectDetector* d = b.detector;
        route(server, "/detect", [d](const wire::json& j) {
            return wire::objects_to_json(d->detect_objects(wire::parse_image_request(j).image_ref));
        });
    }
    if (b.explainer) {
        const Explainer* x = b.explainer;
        route(server, "/explain", [x](const wire::json& j) {
            const auto req = wire::parse_explain_request(j);
            return wire::explanation_to_json(x->explain(req.prompt, req.image_ref));
        });
    }
    if (b.reader) {
        const Reader* r = b.reader;
        route(server, "/answer", [r](const wire::json& j) {
            const auto req = wire::parse_answer_request(j);
            return wire::to_json(r->answer(req.text, req.image_ref, req.options));
        });
    }
}

}  // namespace nlki
