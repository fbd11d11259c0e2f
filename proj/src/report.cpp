#include "gcnl/report.hpp"

#include <cstdio>
#include <sstream>

namespace gcnl {

std::string fmt_metric(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string history_csv(const History& history, bool include_timing)
{
    std::ostringstream os;
    os << metrics_csv_header << '\n';
    for (const auto& e : history.epochs) {
        if (!e.val) {
            continue;
        }
        char seconds[32];
        std::snprintf(seconds, sizeof(seconds), "%.3f", include_timing ? e.seconds : 0.0);
        os << e.epoch << ',' << fmt_metric(e.train_loss) << ',' << fmt_metric(e.val->macro_auc) << ','
           << fmt_metric(e.val->macro_recall) << ',' << fmt_metric(e.val->accuracy) << ',' << seconds << '\n';
    }
    return os.str();
}

std::string format_metrics(const MetricsReport& report, const std::vector<std::string>& class_names)
{
    std::ostringstream os;
    os << "samples " << report.samples << '\n';
    os << "macro_auc " << fmt_metric(report.macro_auc) << '\n';
    os << "macro_recall " << fmt_metric(report.macro_recall) << '\n';
    os << "accuracy " << fmt_metric(report.accuracy) << '\n';
    if (!report.auc_excluded.empty()) {
        os << "auc_excluded";
        for (const auto c : report.auc_excluded) {
            os << ' ' << (c < class_names.size() ? class_names[c] : std::to_string(c));
        }
        os << '\n';
    }
    os << "class precision recall\n";
    for (std::size_t c = 0; c < report.recall.size(); ++c) {
        os << (c < class_names.size() ? class_names[c] : std::to_string(c)) << ' ' << fmt_metric(report.precision[c])
           << ' ' << fmt_metric(report.recall[c]) << '\n';
    }
    os << "confusion (rows true, columns predicted)\n";
    for (const auto& row : report.confusion) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            os << (j ? " " : "") << row[j];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace gcnl
