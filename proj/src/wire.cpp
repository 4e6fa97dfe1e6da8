#include "nlki/wire.hpp"

#include <cmath>

#include "nlki/errors.hpp"

namespace nlki::wire {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw ContractError("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw ContractError(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string str(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) throw ContractError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<std::string> str_list(const json& v, const char* key) {
    if (!v.is_array()) throw ContractError(std::string("field \"") + key + "\" must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw ContractError(std::string("field \"") + key + "\" must hold strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<float> float_list(const json& v, const char* key) {
    if (!v.is_array()) throw ContractError(std::string("field \"") + key + "\" must be an array");
    std::vector<float> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ContractError(std::string("field \"") + key + "\" must hold numbers");
        const double d = e.get<double>();
        if (!std::isfinite(d)) throw ContractError(std::string("field \"") + key + "\" is not finite");
        out.push_back(static_cast<float>(d));
    }
    return out;
}

std::size_t dim_field(const json& j) {
    const json& d = field(j, "dim");
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
        throw ContractError("field \"dim\" must be a positive integer");
    }
    return d.get<std::size_t>();
}

}  // namespace

json to_json(const TextRequest& r) { return json{{"text", r.text}}; }
json to_json(const ImageRequest& r) { return json{{"image_ref", r.image_ref}}; }

json to_json(const ExplainRequest& r) {
    json j{{"prompt", r.prompt}};
    if (!r.image_ref.empty()) j["image_ref"] = r.image_ref;
    return j;
}

json to_json(const AnswerRequest& r) {
    return json{{"text", r.text}, {"image_ref", r.image_ref}, {"options", r.options}};
}

json to_json(const EmbeddingVector& v) { return json{{"dim", v.dim()}, {"values", v.values}}; }

json to_json(const TokenEmbeddings& t) {
    json vectors = json::array();
    for (const auto& v : t.vectors) vectors.push_back(v.values);
    const std::size_t dim = t.vectors.empty() ? 0 : t.vectors.front().dim();
    return json{{"dim", dim}, {"tokens", t.tokens}, {"vectors", std::move(vectors)}};
}

json to_json(const VisualContext& ctx) {
    json j = json::object();
    if (ctx.traditional_caption) j["traditional_caption"] = *ctx.traditional_caption;
    if (ctx.dense_caption) j["dense_caption"] = *ctx.dense_caption;
    if (ctx.region_captions) j["region_captions"] = *ctx.region_captions;
    if (ctx.objects) j["objects"] = *ctx.objects;
    if (ctx.scene_graph) {
        json sg = json::array();
        for (const auto& t : *ctx.scene_graph) sg.push_back(json::array({t.subject, t.relation, t.object}));
        j["scene_graph"] = std::move(sg);
    }
    return j;
}

json objects_to_json(const std::vector<std::string>& objects) { return json{{"objects", objects}}; }
json explanation_to_json(const std::string& text) { return json{{"text", text}}; }
json to_json(const AnswerResult& r) { return json{{"label", r.label}, {"scores", r.scores}}; }
json error_json(const std::string& message) { return json{{"error", message}}; }

TextRequest parse_text_request(const json& j) { return TextRequest{str(j, "text")}; }
ImageRequest parse_image_request(const json& j) { return ImageRequest{str(j, "image_ref")}; }

ExplainRequest parse_explain_request(const json& j) {
    ExplainRequest r{str(j, "prompt"), {}};
    if (j.contains("image_ref")) r.image_ref = str(j, "image_ref");
    return r;
}

AnswerRequest parse_answer_request(const json& j) {
    AnswerRequest r{str(j, "text"), str(j, "image_ref"), str_list(field(j, "options"), "options")};
    if (r.options.empty()) throw ContractError("field \"options\" must be non-empty");
    return r;
}

EmbeddingVector parse_embedding(const json& j) {
    const std::size_t dim = dim_field(j);
    EmbeddingVector v{float_list(field(j, "values"), "values")};
    if (v.dim() != dim) throw ContractError("dim field does not match values length");
    return v;
}

TokenEmbeddings parse_token_embeddings(const json& j) {
    const std::size_t dim = dim_field(j);
    TokenEmbeddings t;
    t.tokens = str_list(field(j, "tokens"), "tokens");
    const json& vectors = field(j, "vectors");
    if (!vectors.is_array()) throw ContractError("field \"vectors\" must be an array");
    for (const auto& v : vectors) {
        t.vectors.push_back(EmbeddingVector{float_list(v, "vectors")});
        if (t.vectors.back().dim() != dim) throw ContractError("token vector dim does not match dim field");
    }
    if (t.vectors.size() != t.tokens.size()) throw ContractError("tokens and vectors differ in length");
    return t;
}

VisualContext parse_visual_context(const json& j) {
    if (!j.is_object()) throw ContractError("expected a JSON object");
    VisualContext ctx;
    if (j.contains("traditional_caption")) ctx.traditional_caption = str(j, "traditional_caption");
    if (j.contains("dense_caption")) ctx.dense_caption = str(j, "dense_caption");
    if (j.contains("region_captions")) ctx.region_captions = str_list(j["region_captions"], "region_captions");
    if (j.contains("objects")) {
        ctx.objects = str_list(j["objects"], "objects");
        for (const auto& o : *ctx.objects) {
            if (o.empty()) throw ContractError("object names must be non-empty");
        }
    }
    if (j.contains("scene_graph")) {
        const json& sg = j["scene_graph"];
        if (!sg.is_array()) throw ContractError("field \"scene_graph\" must be an array");
        std::vector<SceneTriplet> triplets;
        for (const auto& t : sg) {
            auto parts = str_list(t, "scene_graph");
            if (parts.size() != 3) throw ContractError("scene_graph entries must be [subject, relation, object]");
            triplets.push_back({parts[0], parts[1], parts[2]});
        }
        ctx.scene_graph = std::move(triplets);
    }
    return ctx;
}

std::vector<std::string> parse_objects(const json& j) {
    auto objects = str_list(field(j, "objects"), "objects");
    for (const auto& o : objects) {
        if (o.empty()) throw ContractError("object names must be non-empty");
    }
    return objects;
}

std::string parse_explanation(const json& j) { return str(j, "text"); }

AnswerResult parse_answer(const json& j) {
    AnswerResult r;
    r.label = str(j, "label");
    const json& scores = field(j, "scores");
    if (!scores.is_array()) throw ContractError("field \"scores\" must be an array");
    for (const auto& s : scores) {
        if (!s.is_number()) throw ContractError("field \"scores\" must hold numbers");
        r.scores.push_back(s.get<double>());
    }
    return r;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ContractError(std::string("malformed JSON body: ") + e.what());
    }
}

}  // namespace nlki::wire
