#ifndef GCNL_EXPERIMENTS_HPP
#define GCNL_EXPERIMENTS_HPP

#include "gcnl/dataset.hpp"
#include "gcnl/model_config.hpp"
#include "gcnl/train.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcnl {

struct CompareRow {
    std::string model;
    double auc = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    std::size_t parameters = 0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
};

// Trains plain, residual and dense (plus `custom` when given, labeled
// "custom") on the same split with the same TrainConfig and model seed,
// and reports validation AUC / Recall / accuracy for each.
CompareResult run_compare(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                          std::uint64_t model_seed, std::size_t width,
                          const std::optional<ModelConfig>& custom = std::nullopt);

// "Model Auc Recall" table, one row per model.
std::string format_compare_table(const CompareResult& result);
std::string compare_csv(const CompareResult& result);

struct LossStudyRow {
    std::string loss; // "cross_entropy" or "focal(g=2)"
    double minority_recall = 0.0;
    double majority_recall = 0.0;
    double macro_recall = 0.0;
    double macro_auc = 0.0;
};

struct LossStudy {
    std::size_t minority_class = 0;
    std::vector<std::size_t> train_counts;
    std::vector<LossStudyRow> rows;
};

// Trains the same initial model under each loss spec on an imbalanced
// training set and reports per-class recall on the validation set.
LossStudy run_loss_study(const ModelConfig& model, const Dataset& train_set, const Dataset& val_set,
                         const TrainConfig& base, const std::vector<LossSpec>& losses);

std::string format_loss_study(const LossStudy& study);

std::string loss_label(const LossSpec& spec);

} // namespace gcnl

#endif // GCNL_EXPERIMENTS_HPP
