#ifndef GCNL_METRICS_HPP
#define GCNL_METRICS_HPP

#include "gcnl/tensor.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gcnl {

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct AucResult {
    double macro = 0.0;
    std::vector<std::optional<double>> per_class; // nullopt for excluded classes
    std::vector<std::size_t> excluded;            // classes with no positives or no negatives
};

// One-vs-rest AUC per class from the rank statistic (ties count one half),
// averaged over the classes where it is defined. Throws
// UndefinedMetricError if no class is defined.
AucResult auc_one_vs_rest(const Tensor& scores, const std::vector<std::size_t>& labels);
double auc_macro(const Tensor& scores, const std::vector<std::size_t>& labels);

// confusion[i][j] counts samples of true class i predicted as j.
ConfusionMatrix confusion(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                          std::size_t classes);

// Unweighted mean of TP/(TP+FN) over classes with at least one true sample.
double recall_macro(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                    std::size_t classes);

// Row-wise argmax; ties go to the lowest class index.
std::vector<std::size_t> argmax_rows(const Tensor& scores);

struct MetricsReport {
    std::size_t epoch = 0;
    std::size_t samples = 0;
    std::vector<double> precision;
    std::vector<double> recall;
    double macro_recall = 0.0;
    double macro_auc = 0.0;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    std::vector<std::size_t> auc_excluded;
};

MetricsReport evaluate_scores(const Tensor& probs, const std::vector<std::size_t>& labels, std::size_t epoch = 0);

} // namespace gcnl

#endif // GCNL_METRICS_HPP
