#pragma once

#include <string>
#include <string_view>

#include "nlki/clients.hpp"

namespace nlki {

// Which visual context is prepended to the question to form the retrieval query.
enum class QueryVariant { Q, C_Q, O_Q, SG_Q, ALL_Q };

QueryVariant parse_query_variant(std::string_view name);
std::string_view to_string(QueryVariant v);

// Q      -> question
// C_Q    -> caption + " " + question
// O_Q    -> "o1, o2" + " " + question
// SG_Q   -> "s r o. " per triplet, then question
// ALL_Q  -> caption + " " + objects + " " + scene graph + question
// Throws ValidationError naming the missing context field.
std::string build_query(QueryVariant variant, const std::string& question, const VisualContext& ctx);

}  // namespace nlki
