#ifndef GCNL_REPORT_HPP
#define GCNL_REPORT_HPP

#include "gcnl/metrics.hpp"
#include "gcnl/train.hpp"

#include <string>
#include <vector>

namespace gcnl {

inline constexpr const char* metrics_csv_header = "epoch,train_loss,val_auc,val_recall,val_accuracy,seconds";

// One row per evaluated epoch. With include_timing false the seconds
// column is written as 0 so reruns produce identical bytes.
std::string history_csv(const History& history, bool include_timing);

// Human readable report: headline metrics, per-class precision/recall and
// the confusion matrix.
std::string format_metrics(const MetricsReport& report, const std::vector<std::string>& class_names);

// Fixed-precision number formatting shared by every report.
std::string fmt_metric(double value);

} // namespace gcnl

#endif // GCNL_REPORT_HPP
