#include "csvm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "csvm/error.hpp"

namespace csvm {

ConfusionCounts confusion(const std::vector<int>& predictions, const std::vector<int>& truths,
                          int positive) {
    if (predictions.size() != truths.size()) {
        throw InvalidInput("confusion: prediction and truth lengths differ");
    }
    if (predictions.empty()) throw InvalidInput("confusion: empty input");

    ConfusionCounts cc;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_pos = predictions[i] == positive;
        const bool true_pos = truths[i] == positive;
        if (pred_pos && true_pos) ++cc.tp;
        else if (!pred_pos && true_pos) ++cc.fn;
        else if (pred_pos && !true_pos) ++cc.fp;
        else ++cc.tn;
    }
    return cc;
}

MetricsReport compute_metrics(const ConfusionCounts& cc) {
    if (cc.total() == 0) throw InvalidInput("compute_metrics: empty confusion counts");

    const double tp = static_cast<double>(cc.tp);
    const double fn = static_cast<double>(cc.fn);
    const double fp = static_cast<double>(cc.fp);
    const double tn = static_cast<double>(cc.tn);
    const double n = tp + fn + fp + tn;

    MetricsReport r;
    r.counts = cc;
    r.acc = (tp + tn) / n;
    if (tp + fn > 0) r.sen = tp / (tp + fn);
    if (tn + fp > 0) r.spe = tn / (tn + fp);
    if (tp + fp > 0) r.pre = tp / (tp + fp);
    if (2 * tp + fn + fp > 0) r.f1 = 2 * tp / (2 * tp + fn + fp);

    const double mcc_den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (mcc_den > 0) r.mcc = (tp * tn - fp * fn) / std::sqrt(mcc_den);

    // Chance agreement from the confusion-matrix marginals.
    const double random_acc = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
    if (random_acc < 1.0) r.kappa = (*r.acc - random_acc) / (1.0 - random_acc);

    return r;
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& truths,
                 int positive) {
    if (scores.size() != truths.size()) {
        throw InvalidInput("roc_auc: score and truth lengths differ");
    }
    if (scores.empty()) throw InvalidInput("roc_auc: empty input");

    std::size_t n_pos = 0, n_neg = 0;
    for (int t : truths) {
        (t == positive ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw DegenerateLabels("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.emplace_back(0.0, 0.0);
    std::uint64_t cum_tp = 0, cum_fp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (truths[order[i]] == positive ? cum_tp : cum_fp)++;
            ++i;
        }
        const double fpr = static_cast<double>(cum_fp) / static_cast<double>(n_neg);
        const double tpr = static_cast<double>(cum_tp) / static_cast<double>(n_pos);
        roc.points.emplace_back(fpr, tpr);
        roc.auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    return roc;
}

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) return "--";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *v * 100.0);
    return buf;
}

} // namespace

std::string metrics_table(const MetricsReport& r) {
    const char* names[] = {"ACC", "SEN", "SPE", "PRE", "F1", "MCC", "Kappa"};
    const std::optional<double> vals[] = {r.acc, r.sen, r.spe, r.pre, r.f1, r.mcc, r.kappa};
    std::string header, row;
    for (int i = 0; i < 7; ++i) {
        std::string value = cell(vals[i]);
        const std::size_t width = std::max(std::string(names[i]).size(), value.size()) + 2;
        std::string h = names[i], v = value;
        h.resize(width, ' ');
        v.resize(width, ' ');
        header += h;
        row += v;
    }
    return header + "\n" + row + "\n";
}

nlohmann::json metrics_json(const MetricsReport& r) {
    auto field = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return {
        {"counts", {{"tp", r.counts.tp}, {"fn", r.counts.fn}, {"fp", r.counts.fp}, {"tn", r.counts.tn}}},
        {"metrics",
         {{"acc", field(r.acc)},
          {"sen", field(r.sen)},
          {"spe", field(r.spe)},
          {"pre", field(r.pre)},
          {"f1", field(r.f1)},
          {"mcc", field(r.mcc)},
          {"kappa", field(r.kappa)}}},
    };
}

std::string roc_csv(const RocCurve& roc) {
    std::string out = "fpr,tpr\n";
    char buf[80];
    for (const auto& [fpr, tpr] : roc.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", fpr, tpr);
        out += buf;
    }
    return out;
}

} // namespace csvm
