#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace csvm {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fn + fp + tn; }
};

// The seven classification metrics as fractions (ACC/SEN/SPE/PRE/F1 in
// [0,1], MCC/Kappa in [-1,1]). A metric whose denominator vanishes is
// reported as an empty optional, never as NaN.
struct MetricsReport {
    ConfusionCounts counts;
    std::optional<double> acc, sen, spe, pre, f1, mcc, kappa;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

// Counts with the designated positive class (+1 by convention).
ConfusionCounts confusion(const std::vector<int>& predictions, const std::vector<int>& truths,
                          int positive = 1);

MetricsReport compute_metrics(const ConfusionCounts& cc);

// Threshold sweep over distinct scores (descending), equal scores grouped
// into one step; AUC by the trapezoidal rule, which gives tied pairs half
// credit.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& truths,
                 int positive = 1);

// Aligned text table in the column order ACC SEN SPE PRE F1 MCC Kappa,
// values as percentages with two decimals; undefined metrics print as "--".
std::string metrics_table(const MetricsReport& report);

// {"counts": {...}, "metrics": {...}} with undefined metrics as null.
nlohmann::json metrics_json(const MetricsReport& report);

// "fpr,tpr" header plus one CSV row per curve point.
std::string roc_csv(const RocCurve& roc);

} // namespace csvm
