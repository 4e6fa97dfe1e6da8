#include <doctest.h>

#include "nlki/errors.hpp"
#include "nlki/noise.hpp"

using namespace nlki;

namespace {

std::vector<int> labels(std::size_t n, std::size_t classes) {
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<int>(i % classes));
    return out;
}

}  // namespace

TEST_CASE("exact-count flips") {
    const auto clean = labels(1000, 3);
    const auto zero = inject_label_noise(clean, 3, {0.0, 1});
    CHECK(zero.labels == clean);
    CHECK(zero.flipped.empty());
    const auto noisy = inject_label_noise(clean, 3, {0.3, 1});
    CHECK(noisy.flipped.size() == 300);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) changed += clean[i] != noisy.labels[i];
    CHECK(changed == 300);
    CHECK(std::is_sorted(noisy.flipped.begin(), noisy.flipped.end()));
    CHECK(inject_label_noise(clean, 3, {0.3, 1}).labels == noisy.labels);
    CHECK(inject_label_noise(labels(10, 3), 3, {0.15, 2}).flipped.size() == 1);
    CHECK(inject_label_noise(labels(20, 2), 2, {0.15, 2}).flipped.size() == 3);
    CHECK_THROWS_AS(inject_label_noise(clean, 3, {1.5, 1}), ValidationError);
    CHECK_THROWS_AS(inject_label_noise(clean, 1, {0.1, 1}), ValidationError);
}

TEST_CASE("audit histogram") {
    std::vector<std::string> tags(1000, "clean");
    CHECK(audit_summary(tags).noisy() == 0);
    for (int i = 0; i < 175; ++i) tags[i] = "label";
    for (int i = 175; i < 265; ++i) tags[i] = "image-question mismatch";
    const auto a = audit_summary(tags);
    CHECK(a.count(NoiseCategory::Label) == 175);
    CHECK(a.count(NoiseCategory::ImageQuestionMismatch) == 90);
    CHECK(a.sample_size == 1000);
    CHECK(a.noisy() == 265);
    CHECK(audit_csv(a).find("label,175") != std::string::npos);
    CHECK_THROWS_AS(audit_summary({"clean", "weird"}), ValidationError);
}

TEST_CASE("ablation grid shapes and determinism") {
    AblationConfig cfg;
    cfg.losses = {LossConfig{}};
    cfg.noise_rates = {0.0};
    cfg.seeds = 1;
    cfg.epochs = 20;
    CHECK(ablation_grid(cfg).size() == 1);

    LossConfig sce;
    sce.kind = LossKind::SCE;
    cfg.losses = {LossConfig{}, sce};
    cfg.noise_rates = {0.3};
    cfg.seeds = 5;
    const auto rows = ablation_grid(cfg);
    CHECK(rows.size() == 10);
    CHECK(rows[0].loss_kind == "CE");
    CHECK(rows[9].loss_kind == "SCE");
    cfg.workers = 3;
    const auto threaded = ablation_grid(cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(ablation_row_json(rows[i]) == ablation_row_json(threaded[i]));
    const auto summary = summarize(rows);
    CHECK(summary.size() == 2);
    CHECK(summary[0].runs == 5);

    LossConfig mixed;
    mixed.kind = LossKind::MIXED;
    CHECK(loss_label(mixed) == "MIXED(lambda=0.4)");
}
