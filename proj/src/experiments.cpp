#include "gcnl/experiments.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/report.hpp"
#include "gcnl/zoo.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gcnl {

namespace {

CompareRow train_and_score(const std::string& label, const ModelConfig& mc, const Dataset& train_set,
                           const Dataset& val_set, const TrainConfig& cfg)
{
    Model model(mc);
    const std::size_t params = model.scalar_parameter_count();
    auto result = train(std::move(model), train_set, val_set, cfg);
    const MetricsReport m = evaluate(result.model, val_set, cfg.epochs);
    return {label, m.macro_auc, m.macro_recall, m.accuracy, params};
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

CompareResult run_compare(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                          std::uint64_t model_seed, std::size_t width, const std::optional<ModelConfig>& custom)
{
    if (train_set.samples.empty()) {
        throw ConfigError("compare needs a non-empty training set");
    }
    const auto& shape = train_set.samples.front().image.shape();
    const InputShape input{1, shape[1], shape[2]};
    CompareResult out;
    for (const auto& name : zoo_names()) {
        out.rows.push_back(train_and_score(name, zoo_config(name, input, train_set.num_classes(), model_seed, width),
                                           train_set, val_set, cfg));
    }
    if (custom) {
        out.rows.push_back(train_and_score("custom", *custom, train_set, val_set, cfg));
    }
    return out;
}

std::string format_compare_table(const CompareResult& result)
{
    std::ostringstream os;
    os << pad("Model", 10) << pad("Auc", 10) << "Recall\n";
    for (const auto& r : result.rows) {
        char auc[16];
        char recall[16];
        std::snprintf(auc, sizeof(auc), "%.2f", r.auc);
        std::snprintf(recall, sizeof(recall), "%.2f", r.recall);
        os << pad(r.model, 10) << pad(auc, 10) << recall << '\n';
    }
    return os.str();
}

std::string compare_csv(const CompareResult& result)
{
    std::ostringstream os;
    os << "model,auc,recall,accuracy,parameters\n";
    for (const auto& r : result.rows) {
        os << r.model << ',' << fmt_metric(r.auc) << ',' << fmt_metric(r.recall) << ',' << fmt_metric(r.accuracy)
           << ',' << r.parameters << '\n';
    }
    return os.str();
}

std::string loss_label(const LossSpec& spec)
{
    if (spec.mode == LossMode::cross_entropy) {
        return "cross_entropy";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "focal(gamma=%g,alpha=%s)", spec.gamma,
                  spec.alpha == AlphaPolicy::frequency ? "frequency" : "uniform");
    return buf;
}

LossStudy run_loss_study(const ModelConfig& model, const Dataset& train_set, const Dataset& val_set,
                         const TrainConfig& base, const std::vector<LossSpec>& losses)
{
    LossStudy study;
    study.train_counts = train_set.class_counts();
    study.minority_class = static_cast<std::size_t>(
        std::min_element(study.train_counts.begin(), study.train_counts.end()) - study.train_counts.begin());
    const std::size_t majority = static_cast<std::size_t>(
        std::max_element(study.train_counts.begin(), study.train_counts.end()) - study.train_counts.begin());
    for (const auto& loss : losses) {
        TrainConfig cfg = base;
        cfg.loss = loss;
        auto result = train(Model(model), train_set, val_set, cfg);
        const MetricsReport m = evaluate(result.model, val_set, cfg.epochs);
        study.rows.push_back(
            {loss_label(loss), m.recall[study.minority_class], m.recall[majority], m.macro_recall, m.macro_auc});
    }
    return study;
}

std::string format_loss_study(const LossStudy& study)
{
    std::ostringstream os;
    os << "train counts";
    for (const auto c : study.train_counts) {
        os << ' ' << c;
    }
    os << " (minority class " << study.minority_class << ")\n";
    os << pad("loss", 36) << pad("minority_recall", 17) << pad("majority_recall", 17) << pad("macro_recall", 14)
       << "macro_auc\n";
    for (const auto& r : study.rows) {
        os << pad(r.loss, 36) << pad(fmt_metric(r.minority_recall), 17) << pad(fmt_metric(r.majority_recall), 17)
           << pad(fmt_metric(r.macro_recall), 14) << fmt_metric(r.macro_auc) << '\n';
    }
    return os.str();
}

} // namespace gcnl
