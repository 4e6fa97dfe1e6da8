#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nlki/losses.hpp"
#include "nlki/toy_trainer.hpp"

namespace nlki {

// Symmetric exact-count label flipping.
struct NoiseSpec {
    double rate = 0.0;
    std::uint64_t seed = 0;
};

struct NoisyLabels {
    std::vector<int> labels;
    std::vector<std::size_t> flipped;  // ascending indices
};

// Flips exactly floor(rate * n) labels chosen without replacement; each
// flipped label moves uniformly to one of the other classes - 1 classes.
NoisyLabels inject_label_noise(const std::vector<int>& labels, std::size_t classes, const NoiseSpec& spec);

enum class NoiseCategory : std::uint8_t { Label, Image, Question, ImageQuestionMismatch, Ambiguous };

inline constexpr std::array<NoiseCategory, 5> kNoiseCategories = {
    NoiseCategory::Label, NoiseCategory::Image, NoiseCategory::Question, NoiseCategory::ImageQuestionMismatch,
    NoiseCategory::Ambiguous};

std::string_view to_string(NoiseCategory c);

struct NoiseAudit {
    std::array<std::size_t, 5> counts{};  // indexed by NoiseCategory
    std::size_t sample_size = 0;

    std::size_t count(NoiseCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    std::size_t noisy() const;
};

// Tags are "clean" or one of: label, image, question,
// image-question mismatch (also "mismatch"), ambiguous. Unknown tags throw.
NoiseAudit audit_summary(const std::vector<std::string>& tags);

std::string audit_table(const NoiseAudit& audit);
std::string audit_csv(const NoiseAudit& audit);

struct AblationCell {
    LossConfig loss;
    double noise_rate = 0.0;
};

struct AblationConfig {
    std::vector<LossConfig> losses;
    std::vector<double> noise_rates;
    std::size_t seeds = 5;
    std::uint64_t master_seed = 0;
    BlobSpec train_blobs;
    BlobSpec test_blobs{3, 2, 3000};  // large clean test set keeps cell means stable
    int epochs = 200;
    double lr = 0.1;
    std::size_t workers = 1;
};

struct AblationRow {
    std::string loss_kind;
    double noise_rate = 0.0;
    std::uint64_t seed = 0;
    double test_acc = 0.0;
    double final_train_loss = 0.0;
};

// "CE", "SCE", "GCE(q=0.7)", "MIXED(lambda=0.4)".
std::string loss_label(const LossConfig& loss);

// One toy training run per (loss, rate, seed). The data seed depends only on
// the seed index and the noise seed on (seed index, rate index), so every
// loss sees identical data and identical flips. Rows come back in
// loss-major, rate, seed order whatever the worker count.
std::vector<AblationRow> ablation_grid(const AblationConfig& config);

std::string ablation_row_json(const AblationRow& row);

struct AblationSummary {
    std::string loss_kind;
    double noise_rate = 0.0;
    double mean_test_acc = 0.0;
    std::size_t runs = 0;
};

std::vector<AblationSummary> summarize(const std::vector<AblationRow>& rows);
std::string summary_table(const std::vector<AblationSummary>& summary);

}  // namespace nlki
