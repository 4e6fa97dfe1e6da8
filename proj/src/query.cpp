#include "nlki/query.hpp"

#include "nlki/errors.hpp"

namespace nlki {

namespace {

const std::string& need_caption(const VisualContext& ctx) {
    if (!ctx.traditional_caption || ctx.traditional_caption->empty()) {
        throw ValidationError("query variant requires traditional_caption");
    }
    return *ctx.traditional_caption;
}

std::string objects_text(const VisualContext& ctx) {
    if (!ctx.objects || ctx.objects->empty()) throw ValidationError("query variant requires objects");
    std::string out;
    for (std::size_t i = 0; i < ctx.objects->size(); ++i) {
        if (i) out += ", ";
        out += (*ctx.objects)[i];
    }
    return out;
}

std::string scene_graph_text(const VisualContext& ctx) {
    if (!ctx.scene_graph || ctx.scene_graph->empty()) throw ValidationError("query variant requires scene_graph");
    std::string out;
    for (const auto& t : *ctx.scene_graph) out += t.subject + " " + t.relation + " " + t.object + ". ";
    return out;
}

}  // namespace

QueryVariant parse_query_variant(std::string_view name) {
    if (name == "Q") return QueryVariant::Q;
    if (name == "C_Q") return QueryVariant::C_Q;
    if (name == "O_Q") return QueryVariant::O_Q;
    if (name == "SG_Q") return QueryVariant::SG_Q;
    if (name == "ALL_Q") return QueryVariant::ALL_Q;
    throw ValidationError("unknown query variant \"" + std::string(name) + "\"");
}

std::string_view to_string(QueryVariant v) {
    switch (v) {
        case QueryVariant::Q: return "Q";
        case QueryVariant::C_Q: return "C_Q";
        case QueryVariant::O_Q: return "O_Q";
        case QueryVariant::SG_Q: return "SG_Q";
        case QueryVariant::ALL_Q: return "ALL_Q";
    }
    return "?";
}

std::string build_query(QueryVariant variant, const std::string& question, const VisualContext& ctx) {
    switch (variant) {
        case QueryVariant::Q: return question;
        case QueryVariant::C_Q: return need_caption(ctx) + " " + question;
        case QueryVariant::O_Q: return objects_text(ctx) + " " + question;
        case QueryVariant::SG_Q: return scene_graph_text(ctx) + question;
        case QueryVariant::ALL_Q:
            return need_caption(ctx) + " " + objects_text(ctx) + " " + scene_graph_text(ctx) + question;
    }
    throw ValidationError("unknown query variant");
}

}  // namespace nlki
