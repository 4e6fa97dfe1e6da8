#include "nlki/mock_clients.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <thread>

#include "nlki/errors.hpp"
#include "nlki/rng.hpp"

namespace nlki {

namespace {

void simulate(std::chrono::milliseconds latency) {
    if (latency.count() > 0) std::this_thread::sleep_for(latency);
}

constexpr std::array<const char*, 24> kObjects = {
    "dog",   "cat",   "ball",  "car",    "bicycle", "umbrella", "orange", "banana",
    "chair", "table", "horse", "bottle", "book",    "cup",      "bench",  "kite",
    "boat",  "bird",  "apple", "laptop", "clock",   "vase",     "train",  "sheep"};
constexpr std::array<const char*, 10> kColors = {"red",   "blue",  "green", "yellow", "white",
                                                 "black", "brown", "gray",  "orange", "pink"};
constexpr std::array<const char*, 8> kScenes = {"beach", "kitchen", "park",   "street",
                                                "field", "harbor",  "office", "garden"};
constexpr std::array<const char*, 5> kSurfaces = {"grass", "sand", "floor", "road", "water"};

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string strip_period(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
    return s;
}

// Value after "<label>" on the first line that starts with it.
std::optional<std::string> line_value(std::string_view text, std::string_view label) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (line.substr(0, label.size()) == label) return std::string(line.substr(label.size()));
        pos = eol + 1;
    }
    return std::nullopt;
}

void erase_case_insensitive(std::string& text, const std::string& word) {
    if (word.empty()) return;
    const std::string needle = to_lower(word);
    for (;;) {
        const std::string lower = to_lower(text);
        const auto at = lower.find(needle);
        if (at == std::string::npos) return;
        text.erase(at, needle.size());
    }
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- embedder

namespace {

std::vector<double> gaussian_unit(std::uint64_t state, std::size_t dim) {
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; i += 2) {
        state = splitmix64(state);
        const double u1 = (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
        state = splitmix64(state);
        const double u2 = static_cast<double>(state >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        v[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < dim) v[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

}  // namespace

MockEmbedder::MockEmbedder(std::size_t dim, std::uint64_t seed, const Tokenizer& tokenizer, TopicNoise topic_noise)
    : dim_(dim), seed_(seed), tokenizer_(&tokenizer), topic_noise_(topic_noise) {
    if (dim_ == 0) throw ValidationError("embedding dim must be positive");
    if (topic_noise_.weight < 0.0) throw ValidationError("topic weight must be >= 0");
    for (std::size_t t = 0; t < topic_noise_.topics; ++t)
        topic_dirs_.push_back(gaussian_unit(splitmix64(seed_ ^ 0x70b1c000ULL) + t, dim_));
}

std::uint64_t MockEmbedder::seed() const {
    if (topic_dirs_.empty()) return seed_;
    return splitmix64(seed_ ^ splitmix64(topic_noise_.topics) ^ std::bit_cast<std::uint64_t>(topic_noise_.weight));
}

std::vector<double> MockEmbedder::raw_token_vector(std::string_view token) const {
    const std::uint64_t h = fnv1a64(token);
    auto v = gaussian_unit(h ^ splitmix64(seed_ + 0x5eed), dim_);
    if (topic_dirs_.empty()) return v;
    const auto& dir = topic_dirs_[splitmix64(h ^ seed_) % topic_dirs_.size()];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        v[i] += topic_noise_.weight * dir[i];
        norm2 += v[i] * v[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

EmbeddingVector MockEmbedder::token_vector(std::string_view token) const {
    const auto raw = raw_token_vector(token);
    EmbeddingVector out;
    out.values.assign(raw.begin(), raw.end());
    return out;
}

EmbeddingVector MockEmbedder::embed_text(std::string_view text) const {
    const auto tokens = tokenizer_->tokenize(text);
    if (tokens.empty()) throw ValidationError("empty input");
    std::vector<double> sum(dim_, 0.0);
    for (const auto& t : tokens) {
        const auto v = raw_token_vector(t);
        for (std::size_t i = 0; i < dim_; ++i) sum[i] += v[i];
    }
    double norm2 = 0.0;
    for (double x : sum) norm2 += x * x;
    EmbeddingVector out;
    out.values.resize(dim_);
    if (norm2 == 0.0) throw ContractError("embedding collapsed to zero");
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < dim_; ++i) out.values[i] = static_cast<float>(sum[i] * inv);
    return out;
}

TokenEmbeddings MockEmbedder::embed_tokens(std::string_view text) const {
    TokenEmbeddings out;
    out.tokens = tokenizer_->tokenize(text);
    if (out.tokens.empty()) throw ValidationError("empty input");
    out.vectors.reserve(out.tokens.size());
    for (const auto& t : out.tokens) out.vectors.push_back(token_vector(t));
    return out;
}

// ---------------------------------------------------------------- vision

MockScene mock_scene(std::string_view image_ref, std::uint64_t seed) {
    Rng rng(fnv1a64(image_ref) ^ splitmix64(seed));
    MockScene s;
    std::vector<std::size_t> idx(kObjects.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t j = i + rng.uniform_index(idx.size() - i);
        std::swap(idx[i], idx[j]);
        s.objects.emplace_back(kObjects[idx[i]]);
        s.colors.emplace_back(kColors[rng.uniform_index(kColors.size())]);
    }
    s.scene = kScenes[rng.uniform_index(kScenes.size())];
    s.surface = kSurfaces[rng.uniform_index(kSurfaces.size())];
    return s;
}

VisualContext MockCaptioner::caption(std::string_view image_ref) const {
    simulate(latency_);
    const MockScene s = mock_scene(image_ref, seed_);
    const auto& o = s.objects;
    const auto& c = s.colors;
    VisualContext ctx;
    ctx.traditional_caption = "a " + o[0] + " near a " + o[1] + " in the " + s.scene;
    ctx.dense_caption = "a " + s.scene + " with a " + c[0] + " " + o[0] + ", a " + c[1] + " " + o[1] +
                        " and a " + c[2] + " " + o[2] + " on the " + s.surface;
    ctx.region_captions = std::vector<std::string>{c[0] + " " + o[0], c[1] + " " + o[1],
                                                   o[2] + " on the " + s.surface};
    ctx.objects = o;
    ctx.scene_graph = std::vector<SceneTriplet>{{o[0], "near", o[1]}, {o[2], "on", s.surface}};
    return ctx;
}

std::vector<std::string> MockObjectDetector::detect_objects(std::string_view image_ref) const {
    simulate(latency_);
    return mock_scene(image_ref, seed_).objects;
}

// ---------------------------------------------------------------- explainer

std::vector<std::string> parse_forbidden_words(std::string_view prompt) {
    std::vector<std::string> words;
    auto line = line_value(prompt, "Forbidden words:");
    if (!line) return words;
    std::size_t pos = 0;
    for (;;) {
        const auto open = line->find('"', pos);
        if (open == std::string::npos) break;
        const auto close = line->find('"', open + 1);
        if (close == std::string::npos) break;
        words.push_back(line->substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    return words;
}

std::string MockExplainer::explain(std::string_view prompt, std::string_view image_ref) const {
    simulate(latency_);
    std::string out;
    if (!image_ref.empty()) {
        const MockScene s = mock_scene(image_ref, seed_);
        out = "the " + s.colors[0] + " " + s.objects[0] + " is next to the " + s.objects[1];
    } else {
        std::optional<std::string> context = line_value(prompt, "Dense Caption (DC): ");
        if (!context) context = line_value(prompt, "Region Caption (RC): ");
        if (!context) context = line_value(prompt, "Traditional-Caption-(TC): ");
        const auto objects = line_value(prompt, "Objects (O): ");
        const auto fact = line_value(prompt, "Fact: ");
        static constexpr std::array<const char*, 3> kLeads = {"the scene shows", "we can see",
                                                              "there is"};
        const char* lead = kLeads[splitmix64(seed_ ^ fnv1a64(prompt)) % kLeads.size()];
        out = lead;
        out += " " + (context ? strip_period(*context) : std::string("a familiar setting"));
        if (objects) out += " including " + strip_period(*objects);
        if (fact) out += " and " + to_lower(strip_period(*fact));
    }
    for (const auto& w : parse_forbidden_words(prompt)) erase_case_insensitive(out, w);
    out = collapse_spaces(out);
    if (out.empty()) out = "no explanation";
    return out;
}

// ---------------------------------------------------------------- readers

AnswerResult MockReader::answer(std::string_view text, std::string_view image_ref,
                                const std::vector<std::string>& options) const {
    simulate(latency_);
    if (options.empty()) throw ValidationError("answer requires at least one option");
    const auto text_tokens = tokenize(text);
    std::vector<double> logits(options.size());
    for (std::size_t i = 0; i < options.size(); ++i) {
        double overlap = 0.0;
        for (const auto& t : tokenize(options[i])) {
            if (std::find(text_tokens.begin(), text_tokens.end(), t) != text_tokens.end()) overlap += 1.0;
        }
        const std::uint64_t h =
            splitmix64(seed_ ^ fnv1a64(options[i]) ^ splitmix64(fnv1a64(text) + fnv1a64(image_ref)));
        logits[i] = overlap + 0.5 * (static_cast<double>(h >> 11) * 0x1.0p-53);
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& l : logits) z += (l = std::exp(l - mx));
    AnswerResult r;
    r.scores.resize(options.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        r.scores[i] = logits[i] / z;
        if (r.scores[i] > r.scores[best]) best = i;
    }
    r.label = options[best];
    return r;
}

AnswerResult EchoReader::answer(std::string_view, std::string_view image_ref,
                                const std::vector<std::string>& options) const {
    if (options.empty()) throw ValidationError("answer requires at least one option");
    AnswerResult r;
    auto it = answers_.find(std::string(image_ref));
    r.label = it != answers_.end() ? it->second : options.front();
    r.scores.assign(options.size(), 0.0);
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (options[i] == r.label) r.scores[i] = 1.0;
    }
    return r;
}

}  // namespace nlki
