#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "csvm/error.hpp"
#include "csvm/image_ingest.hpp"
#include "csvm/metrics.hpp"
#include "csvm/model_io.hpp"
#include "csvm/net.hpp"
#include "csvm/run_config.hpp"

namespace {

using namespace csvm;

struct CommonOpts {
    std::string config_path;
    std::string dataset_root;
    std::string split_path;
    std::string positive_class;
    bool seed_set = false;
    std::uint64_t seed = 0;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);
    if (!opts.dataset_root.empty()) cfg.dataset_root = opts.dataset_root;
    if (!opts.split_path.empty()) cfg.split_file = opts.split_path;
    if (!opts.positive_class.empty()) cfg.positive_class = opts.positive_class;
    if (opts.seed_set) cfg.train.master_seed = opts.seed;
    validate(cfg);
    if (cfg.dataset_root.empty()) {
        throw InvalidArgument("no dataset root given (config dataset_root or --dataset-root)");
    }
    return cfg;
}

Dataset load_configured_dataset(const RunConfig& cfg) {
    Dataset ds = load_dataset(cfg.dataset_root, cfg.positive_class, cfg.input_height,
                              cfg.input_width);
    std::printf("loaded %zu images (%zu %s / %zu %s)\n", ds.samples.size(), ds.count(1),
                ds.class_names[0].c_str(), ds.count(-1), ds.class_names[1].c_str());
    return ds;
}

std::vector<LabeledTensor> gather(const Dataset& ds, const std::vector<std::size_t>& indices) {
    std::vector<LabeledTensor> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        out.push_back({ds.samples[i].tensor, ds.samples[i].label});
    }
    return out;
}

int cmd_split(const CommonOpts& opts, double train_fraction_flag, const std::string& out_path) {
    RunConfig cfg = resolve_config(opts);
    if (train_fraction_flag > 0.0) cfg.train_fraction = train_fraction_flag;
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must be in (0, 1)");
    }

    const Dataset ds = load_configured_dataset(cfg);
    const SplitSpec split = split_dataset(ds, cfg.train_fraction, cfg.train.master_seed);

    auto [train_idx, test_idx] = apply_split(ds, split);
    for (int label : {1, -1}) {
        std::size_t n_train = 0, n_test = 0;
        for (std::size_t i : train_idx) n_train += ds.samples[i].label == label;
        for (std::size_t i : test_idx) n_test += ds.samples[i].label == label;
        std::printf("%s: %zu train / %zu test\n",
                    (label == 1 ? ds.class_names[0] : ds.class_names[1]).c_str(), n_train, n_test);
    }
    std::printf("total: %zu train / %zu test\n", split.train_ids.size(), split.test_ids.size());

    save_split(split, out_path);
    std::printf("wrote split to %s\n", out_path.c_str());
    return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& model_out) {
    const RunConfig cfg = resolve_config(opts);
    if (cfg.split_file.empty()) {
        throw InvalidArgument("no split file given (config split_file or --split)");
    }
    const Dataset ds = load_configured_dataset(cfg);
    const SplitSpec split = load_split(cfg.split_file);
    auto [train_idx, test_idx] = apply_split(ds, split);
    std::printf("training on %zu images, holding out %zu\n", train_idx.size(), test_idx.size());

    const auto train_samples = gather(ds, train_idx);
    CsvmNetwork net = train_network(train_samples, cfg.arch, cfg.train, [](const BlockTiming& t) {
        std::printf("block %d: %.2f s (filters + forward), head %.2f s\n", t.depth, t.block_s,
                    t.head_s);
        std::fflush(stdout);
    });
    net.class_names = ds.class_names;

    save_network(net, model_out);
    std::printf("wrote model to %s (%d blocks", model_out.c_str(), net.depth());
    for (const auto& head : net.heads) std::printf(", head dim %zu", head.weights.size());
    std::printf(")\n");
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& model_path, int depth,
             const std::string& json_out, const std::string& roc_out) {
    const CsvmNetwork net = load_network(model_path);
    const int use_depth = depth == 0 ? net.depth() : depth;
    if (use_depth < 1 || use_depth > net.depth()) {
        throw InvalidArgument("depth " + std::to_string(use_depth) + " out of range [1, " +
                              std::to_string(net.depth()) + "]");
    }

    const RunConfig cfg = resolve_config(opts);
    if (cfg.split_file.empty()) {
        throw InvalidArgument("no split file given (config split_file or --split)");
    }
    // Class mapping and input size come from the model, never the config;
    // evaluating with a different orientation would silently flip labels.
    const Dataset ds = load_dataset(cfg.dataset_root, net.class_names[0], net.input_height,
                                    net.input_width);
    const SplitSpec split = load_split(cfg.split_file);
    auto [train_idx, test_idx] = apply_split(ds, split);
    std::printf("evaluating depth %d on %zu test images\n", use_depth, test_idx.size());

    std::vector<int> predictions, truths;
    std::vector<double> scores;
    for (std::size_t i : test_idx) {
        const auto [label, score] = infer(net, ds.samples[i].tensor, use_depth);
        predictions.push_back(label);
        truths.push_back(ds.samples[i].label);
        scores.push_back(score);
    }

    const ConfusionCounts cc = confusion(predictions, truths, 1);
    const MetricsReport report = compute_metrics(cc);
    std::printf("TP %llu  FN %llu  FP %llu  TN %llu\n",
                static_cast<unsigned long long>(cc.tp), static_cast<unsigned long long>(cc.fn),
                static_cast<unsigned long long>(cc.fp), static_cast<unsigned long long>(cc.tn));
    std::fputs(metrics_table(report).c_str(), stdout);

    nlohmann::json j = metrics_json(report);
    j["depth"] = use_depth;
    bool have_roc = false;
    RocCurve roc;
    try {
        roc = roc_auc(scores, truths, 1);
        have_roc = true;
        std::printf("AUC %.4f\n", roc.auc);
        j["auc"] = roc.auc;
    } catch (const DegenerateLabels&) {
        std::fprintf(stderr, "ROC skipped: test partition contains a single class\n");
        j["auc"] = nullptr;
    }

    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw DataError("cannot write " + json_out);
        out << j.dump(2) << "\n";
        std::printf("wrote metrics to %s\n", json_out.c_str());
    }
    if (!roc_out.empty() && have_roc) {
        std::ofstream out(roc_out);
        if (!out) throw DataError("cannot write " + roc_out);
        out << roc_csv(roc);
        std::printf("wrote ROC points to %s\n", roc_out.c_str());
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& image_path, int depth) {
    const CsvmNetwork net = load_network(model_path);
    const int use_depth = depth == 0 ? net.depth() : depth;
    if (use_depth < 1 || use_depth > net.depth()) {
        throw InvalidArgument("depth " + std::to_string(use_depth) + " out of range [1, " +
                              std::to_string(net.depth()) + "]");
    }
    const Tensor3 t = load_image(image_path, net.input_height, net.input_width);
    const auto [label, score] = infer(net, t, use_depth);
    std::printf("%s %.6f\n", (label == 1 ? net.class_names[0] : net.class_names[1]).c_str(), score);
    return 0;
}

int cmd_metrics(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn,
                const std::string& json_out) {
    const MetricsReport report = compute_metrics({tp, fn, fp, tn});
    std::fputs(metrics_table(report).c_str(), stdout);
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw DataError("cannot write " + json_out);
        out << metrics_json(report).dump(2) << "\n";
    }
    return 0;
}

void apply_thread_cap(int threads_flag) {
#ifdef _OPENMP
    int cap = threads_flag;
    if (cap <= 0) {
        if (const char* env = std::getenv("CSVM_THREADS")) {
            cap = std::atoi(env);
        }
    }
    if (cap > 0) omp_set_num_threads(cap);
#else
    (void)threads_flag;
#endif
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convolutional SVM network: feed-forward filter learning for "
                 "binary image classification"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap on OpenMP workers (env CSVM_THREADS); results do not depend on it");

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub, bool with_dataset) {
        sub->fallthrough();  // allow global flags like --threads after the subcommand
        sub->add_option("--config", opts.config_path, "run configuration JSON");
        if (with_dataset) {
            sub->add_option("--dataset-root", opts.dataset_root, "two-class image directory");
            sub->add_option("--split", opts.split_path, "split JSON path");
            sub->add_option("--positive-class", opts.positive_class, "class directory mapped to +1");
            sub->add_option("--seed", opts.seed, "master seed override")
                ->each([&](const std::string&) { opts.seed_set = true; });
        }
    };

    auto* split_cmd = app.add_subcommand("split", "stratified train/test split of a dataset");
    add_common(split_cmd, true);
    double train_fraction_flag = 0.0;
    split_cmd->add_option("--train-fraction", train_fraction_flag, "fraction of each class used for training");
    std::string split_out = "split.json";
    split_cmd->add_option("--out", split_out, "output split path");

    auto* train_cmd = app.add_subcommand("train", "train filter banks and per-depth heads");
    add_common(train_cmd, true);
    std::string model_out = "model.csvm";
    train_cmd->add_option("--out", model_out, "output model path");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on the test partition");
    add_common(eval_cmd, true);
    std::string eval_model, eval_json, eval_roc;
    int eval_depth = 0;
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--depth", eval_depth, "network depth to classify at (default: deepest)");
    eval_cmd->add_option("--json", eval_json, "write the metrics report as JSON");
    eval_cmd->add_option("--roc-csv", eval_roc, "write ROC curve points as CSV");

    auto* predict_cmd = app.add_subcommand("predict", "classify a single image");
    predict_cmd->fallthrough();
    std::string predict_model, predict_image;
    int predict_depth = 0;
    predict_cmd->add_option("--model", predict_model, "model file")->required();
    predict_cmd->add_option("--image", predict_image, "image to classify")->required();
    predict_cmd->add_option("--depth", predict_depth, "network depth to classify at (default: deepest)");

    auto* metrics_cmd =
        app.add_subcommand("metrics", "compute the seven metrics from confusion counts");
    metrics_cmd->fallthrough();
    std::uint64_t m_tp = 0, m_fn = 0, m_fp = 0, m_tn = 0;
    std::string metrics_json_out;
    metrics_cmd->add_option("tp", m_tp, "true positives")->required();
    metrics_cmd->add_option("fn", m_fn, "false negatives")->required();
    metrics_cmd->add_option("fp", m_fp, "false positives")->required();
    metrics_cmd->add_option("tn", m_tn, "true negatives")->required();
    metrics_cmd->add_option("--json", metrics_json_out, "write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    apply_thread_cap(threads);

    try {
        if (app.got_subcommand(split_cmd)) return cmd_split(opts, train_fraction_flag, split_out);
        if (app.got_subcommand(train_cmd)) return cmd_train(opts, model_out);
        if (app.got_subcommand(eval_cmd)) {
            return cmd_eval(opts, eval_model, eval_depth, eval_json, eval_roc);
        }
        if (app.got_subcommand(predict_cmd)) {
            return cmd_predict(predict_model, predict_image, predict_depth);
        }
        if (app.got_subcommand(metrics_cmd)) {
            return cmd_metrics(m_tp, m_fn, m_fp, m_tn, metrics_json_out);
        }
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
