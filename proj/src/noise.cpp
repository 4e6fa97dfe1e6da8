#include "nlki/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/rng.hpp"

namespace nlki {

NoisyLabels inject_label_noise(const std::vector<int>& labels, std::size_t classes, const NoiseSpec& spec) {
    if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) throw ValidationError("noise rate must lie in [0, 1]");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw ValidationError("label out of range");
    }
    NoisyLabels out{labels, {}};
    // The epsilon keeps products like 0.3 * 1000 from flooring to 299.
    const auto count = static_cast<std::size_t>(std::floor(spec.rate * static_cast<double>(labels.size()) + 1e-9));
    if (count == 0) return out;
    if (classes < 2) throw ValidationError("label noise needs at least 2 classes");

    Rng rng(spec.seed);
    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
    out.flipped.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(out.flipped.begin(), out.flipped.end());
    for (std::size_t i : out.flipped) {
        auto other = static_cast<int>(rng.uniform_index(classes - 1));
        if (other >= labels[i]) ++other;
        out.labels[i] = other;
    }
    return out;
}

std::string_view to_string(NoiseCategory c) {
    switch (c) {
        case NoiseCategory::Label: return "label";
        case NoiseCategory::Image: return "image";
        case NoiseCategory::Question: return "question";
        case NoiseCategory::ImageQuestionMismatch: return "image-question mismatch";
        case NoiseCategory::Ambiguous: return "ambiguous";
    }
    return "?";
}

std::size_t NoiseAudit::noisy() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

NoiseAudit audit_summary(const std::vector<std::string>& tags) {
    NoiseAudit audit;
    audit.sample_size = tags.size();
    for (const auto& raw : tags) {
        std::string tag;
        for (char c : raw) tag += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (tag == "clean") continue;
        if (tag == "mismatch" || tag == "image_question_mismatch") tag = "image-question mismatch";
        bool known = false;
        for (auto c : kNoiseCategories) {
            if (tag == to_string(c)) {
                ++audit.counts[static_cast<std::size_t>(c)];
                known = true;
                break;
            }
        }
        if (!known) throw ValidationError("unknown noise tag \"" + raw + "\"");
    }
    return audit;
}

std::string audit_table(const NoiseAudit& audit) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-26s %7s %8s\n", "category", "count", "percent");
    out += buf;
    const auto pct = [&](std::size_t n) {
        return audit.sample_size ? 100.0 * static_cast<double>(n) / static_cast<double>(audit.sample_size) : 0.0;
    };
    for (auto c : kNoiseCategories) {
        std::snprintf(buf, sizeof buf, "%-26s %7zu %7.1f%%\n", std::string(to_string(c)).c_str(), audit.count(c),
                      pct(audit.count(c)));
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-26s %7zu %7.1f%%\n", "clean", audit.sample_size - audit.noisy(),
                  pct(audit.sample_size - audit.noisy()));
    out += buf;
    return out;
}

std::string audit_csv(const NoiseAudit& audit) {
    std::string out = "category,count\n";
    for (auto c : kNoiseCategories) out += std::string(to_string(c)) + "," + std::to_string(audit.count(c)) + "\n";
    out += "clean," + std::to_string(audit.sample_size - audit.noisy()) + "\n";
    return out;
}

std::string loss_label(const LossConfig& loss) {
    std::string label(to_string(loss.kind));
    char buf[64];
    if (loss.kind == LossKind::MIXED) {
        std::snprintf(buf, sizeof buf, "(lambda=%g)", loss.lambda);
        label += buf;
    } else if (loss.kind == LossKind::GCE) {
        std::snprintf(buf, sizeof buf, "(q=%g)", loss.q);
        label += buf;
    }
    return label;
}

std::vector<AblationRow> ablation_grid(const AblationConfig& config) {
    if (config.losses.empty() || config.noise_rates.empty() || config.seeds == 0) {
        throw ValidationError("ablation grid needs losses, noise rates and seeds");
    }
    for (const auto& l : config.losses) l.validate();

    struct Job {
        std::size_t loss;
        std::size_t rate;
        std::size_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t l = 0; l < config.losses.size(); ++l) {
        for (std::size_t r = 0; r < config.noise_rates.size(); ++r) {
            for (std::size_t s = 0; s < config.seeds; ++s) jobs.push_back({l, r, s});
        }
    }

    std::vector<AblationRow> rows(jobs.size());
    const auto run = [&](const Job& job) {
        const std::uint64_t data_seed = derive_seed(config.master_seed, job.seed);
        Dataset train = make_blobs(config.train_blobs, derive_seed(data_seed, 1));
        const Dataset test = make_blobs(config.test_blobs, derive_seed(data_seed, 2));
        const NoiseSpec noise{config.noise_rates[job.rate], derive_seed(data_seed, 3, job.rate)};
        train.labels = inject_label_noise(train.labels, train.classes, noise).labels;
        const auto& loss = config.losses[job.loss];
        const auto result = train_toy(train, test, loss, config.epochs, config.lr, derive_seed(data_seed, 4));
        AblationRow row;
        row.loss_kind = loss_label(loss);
        row.noise_rate = config.noise_rates[job.rate];
        row.seed = data_seed;
        row.test_acc = result.test_accuracy;
        row.final_train_loss = result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back();
        return row;
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < jobs.size(); i += workers) rows[i] = run(jobs[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::string ablation_row_json(const AblationRow& row) {
    nlohmann::ordered_json j;
    j["loss_kind"] = row.loss_kind;
    j["noise_rate"] = row.noise_rate;
    j["seed"] = row.seed;
    j["test_acc"] = row.test_acc;
    j["final_train_loss"] = row.final_train_loss;
    return j.dump();
}

std::vector<AblationSummary> summarize(const std::vector<AblationRow>& rows) {
    std::vector<AblationSummary> out;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const AblationSummary& s) {
            return s.loss_kind == r.loss_kind && s.noise_rate == r.noise_rate;
        });
        if (it == out.end()) {
            out.push_back({r.loss_kind, r.noise_rate, 0.0, 0});
            it = out.end() - 1;
        }
        it->mean_test_acc += r.test_acc;
        ++it->runs;
    }
    for (auto& s : out) s.mean_test_acc /= static_cast<double>(s.runs);
    return out;
}

std::string summary_table(const std::vector<AblationSummary>& summary) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-18s %6s %6s %12s\n", "loss", "noise", "runs", "clean_acc(%)");
    out += buf;
    for (const auto& s : summary) {
        std::snprintf(buf, sizeof buf, "%-18s %6.2f %6zu %12.2f\n", s.loss_kind.c_str(), s.noise_rate, s.runs,
                      100.0 * s.mean_test_acc);
        out += buf;
    }
    return out;
}

}  // namespace nlki
