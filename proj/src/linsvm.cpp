#include "csvm/linsvm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csvm/error.hpp"

namespace csvm {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kRefreshInterval = 64;  // full score recompute, fixed schedule

// Hinge-loss term of the objective from precomputed scores; serial sum so the
// value is independent of thread count.
double hinge_sum(const std::vector<double>& scores, const std::vector<int>& labels) {
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double m = 1.0 - labels[i] * scores[i];
        if (m > 0.0) sum += m * m;
    }
    return sum;
}

double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// scores[i] = x_i . v, parallel over rows; each row's dot is a fixed-order
// serial reduction, so results do not depend on the worker count.
void matvec_rows(const PatchSet& data, const std::vector<double>& v, std::vector<double>& out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.count());
    const std::size_t d = data.dim;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const float* row = data.row(static_cast<std::size_t>(i));
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (std::size_t j = 0; j < d; ++j) {
            acc += static_cast<double>(row[j]) * v[j];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

// g = 2w - 2C * sum_i y_i max(1 - y_i s_i, 0) x_i. The feature-matrix sum is
// parallelized over column blocks; within a block rows are visited in fixed
// ascending order, which keeps the result identical at any thread count.
void gradient(const PatchSet& data, double c, const std::vector<double>& w,
              const std::vector<double>& scores, std::vector<double>& coef_buf,
              std::vector<double>& g) {
    const std::size_t n = data.count();
    const std::size_t d = data.dim;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = 1.0 - data.labels[i] * scores[i];
        coef_buf[i] = m > 0.0 ? 2.0 * c * data.labels[i] * m : 0.0;
    }

    constexpr std::size_t kBlock = 512;
    const std::ptrdiff_t n_blocks = static_cast<std::ptrdiff_t>((d + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, d);
        for (std::size_t j = lo; j < hi; ++j) {
            g[j] = 2.0 * w[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double a = coef_buf[i];
            if (a == 0.0) continue;
            const float* row = data.row(i) + lo;
            double* gj = g.data() + lo;
            const std::size_t len = hi - lo;
#pragma omp simd
            for (std::size_t j = 0; j < len; ++j) {
                gj[j] -= a * row[j];
            }
        }
    }
}

} // namespace

SvmModel train_l2svm(const PatchSet& data, double c, double tol, int max_iter) {
    const std::size_t n = data.count();
    const std::size_t d = data.dim;
    if (d == 0) throw InvalidInput("training features have dimension 0");
    if (n < 2) throw InvalidInput("training needs at least 2 rows");
    if (c <= 0.0) throw InvalidArgument("penalty C must be positive");
    if (tol <= 0.0) throw InvalidArgument("tolerance must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be positive");

    bool has_pos = false, has_neg = false;
    for (int y : data.labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw InvalidInput("labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) {
        throw DegenerateLabels("training set contains a single class");
    }
    for (float v : data.features) {
        if (!std::isfinite(v)) throw InvalidInput("training features contain non-finite values");
    }

    std::vector<double> w(d, 0.0);
    std::vector<double> g(d, 0.0);
    std::vector<double> scores(n, 0.0);    // x_i . w, maintained incrementally
    std::vector<double> step_dir(n, 0.0);  // x_i . g for the line search
    std::vector<double> coef(n, 0.0);

    double w_sq = 0.0;
    double objective = c * hinge_sum(scores, data.labels);  // w = 0
    double step = 1.0;

    SvmModel model;
    model.penalty_c = c;
    model.objective_trace.reserve(static_cast<std::size_t>(max_iter) + 1);
    model.objective_trace.push_back(objective);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (iter > 0 && iter % kRefreshInterval == 0) {
            matvec_rows(data, w, scores);
            // Taking the min keeps the recorded objective sequence monotone
            // even when the fresh evaluation lands a few ulps above the
            // incrementally tracked value.
            objective = std::min(objective, w_sq + c * hinge_sum(scores, data.labels));
        }

        gradient(data, c, w, scores, coef, g);
        const double g_sq = squared_norm(g);
        if (std::sqrt(g_sq) <= tol * (1.0 + std::sqrt(w_sq))) {
            model.converged = true;
            break;
        }

        matvec_rows(data, g, step_dir);
        const double wg = [&] {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += w[j] * g[j];
            return s;
        }();

        // Backtracking on w' = w - t*g. Scores and |w|^2 update in O(n + 1)
        // per trial; only the accepted step touches w itself.
        double t = step;
        bool accepted = false;
        double trial_obj = 0.0, trial_wsq = 0.0;
        while (t > 1e-20) {
            trial_wsq = w_sq - 2.0 * t * wg + t * t * g_sq;
            double hinge = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double m = 1.0 - data.labels[i] * (scores[i] - t * step_dir[i]);
                if (m > 0.0) hinge += m * m;
            }
            trial_obj = trial_wsq + c * hinge;
            if (trial_obj <= objective - kArmijoC * t * g_sq) {
                accepted = true;
                break;
            }
            t *= kBacktrack;
        }
        if (!accepted) break;  // no descent step representable; treat as stalled

        for (std::size_t j = 0; j < d; ++j) w[j] -= t * g[j];
        for (std::size_t i = 0; i < n; ++i) scores[i] -= t * step_dir[i];
        w_sq = trial_wsq;
        objective = trial_obj;
        model.objective_trace.push_back(objective);
        step = std::min(t * 2.0, 1.0e6);  // let the step grow back after backtracks
    }

    model.iterations_run = iter;
    model.final_objective = objective;
    model.weights.resize(d);
    for (std::size_t j = 0; j < d; ++j) model.weights[j] = static_cast<float>(w[j]);
    return model;
}

double decision(const SvmModel& model, const float* x, std::size_t len) {
    if (len != model.weights.size()) {
        throw InvalidInput("decision: feature length " + std::to_string(len) +
                           " does not match model dimension " +
                           std::to_string(model.weights.size()));
    }
    const float* w = model.weights.data();
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = 0; j < len; ++j) {
        acc += static_cast<double>(w[j]) * x[j];
    }
    return acc;
}

double decision(const SvmModel& model, const std::vector<float>& x) {
    return decision(model, x.data(), x.size());
}

int label_from_score(double score) {
    return score > 0.0 ? 1 : -1;
}

int predict(const SvmModel& model, const std::vector<float>& x) {
    return label_from_score(decision(model, x));
}

} // namespace csvm
