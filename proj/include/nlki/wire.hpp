#pragma once

// JSON request/response bodies for the service endpoints:
//   POST /embed        {"text"}                          -> {"dim","values"}
//   POST /embed_tokens {"text"}                          -> {"dim","tokens","vectors"}
//   POST /caption      {"image_ref"}                     -> VisualContext fields
//   POST /detect       {"image_ref"}                     -> {"objects"}
//   POST /explain      {"prompt","image_ref"?}           -> {"text"}
//   POST /answer       {"text","image_ref","options"}    -> {"label","scores"}
// Errors come back as {"error": "..."} with a 4xx/5xx status.

#include <string>
#include <vector>

#include <json.hpp>

#include "nlki/clients.hpp"

namespace nlki::wire {

using json = nlohmann::ordered_json;

struct TextRequest {
    std::string text;
};
struct ImageRequest {
    std::string image_ref;
};
struct ExplainRequest {
    std::string prompt;
    std::string image_ref;  // empty when absent
};
struct AnswerRequest {
    std::string text;
    std::string image_ref;
    std::vector<std::string> options;
};

json to_json(const TextRequest& r);
json to_json(const ImageRequest& r);
json to_json(const ExplainRequest& r);
json to_json(const AnswerRequest& r);
json to_json(const EmbeddingVector& v);
json to_json(const TokenEmbeddings& t);
json to_json(const VisualContext& ctx);
json objects_to_json(const std::vector<std::string>& objects);
json explanation_to_json(const std::string& text);
json to_json(const AnswerResult& r);
json error_json(const std::string& message);

// Parsers throw ContractError naming the offending field.
TextRequest parse_text_request(const json& j);
ImageRequest parse_image_request(const json& j);
ExplainRequest parse_explain_request(const json& j);
AnswerRequest parse_answer_request(const json& j);
EmbeddingVector parse_embedding(const json& j);
TokenEmbeddings parse_token_embeddings(const json& j);
VisualContext parse_visual_context(const json& j);
std::vector<std::string> parse_objects(const json& j);
std::string parse_explanation(const json& j);
AnswerResult parse_answer(const json& j);

json parse_body(const std::string& body);

}  // namespace nlki::wire
