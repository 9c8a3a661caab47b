// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Needs the csvm binary (--cli) and a scratch directory
// (--work). The optional CT-dataset integration run is enabled by pointing
// CSVM_CT_DATASET at a local copy of the two-class CT image directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "csvm/layers.hpp"
#include "csvm/linsvm.hpp"
#include "csvm/metrics.hpp"
#include "csvm/net.hpp"
#include "csvm/reference.hpp"
#include "csvm/rng.hpp"
#include "support/stripes.hpp"

using namespace csvm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
fs::path g_work;

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    const fs::path out_file = g_work / "cli_output.txt";
    const std::string cmd =
        "\"" + g_cli + "\" " + args + " > \"" + out_file.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(out_file);
        output->assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool check(bool ok, const char* what) {
    if (!ok) std::printf("    failed: %s\n", what);
    return ok;
}

// ---------------------------------------------------------------------------
// 1. The metrics command reproduces two published table rows to +-0.01 pp.

bool metrics_row(const std::string& counts, const std::vector<double>& expected_pct) {
    const fs::path out = g_work / "metrics.json";
    const double t0 = now_s();
    std::string output;
    if (!check(run_cli("metrics " + counts + " --json " + out.string(), &output) == 0,
               "metrics command exited nonzero")) {
        return false;
    }
    const double elapsed = now_s() - t0;
    if (!check(elapsed < 1.0, "metrics command took 1 s or longer")) return false;

    const json j = json::parse(slurp(out));
    const char* keys[] = {"acc", "sen", "spe", "pre", "f1", "mcc", "kappa"};
    for (int i = 0; i < 7; ++i) {
        const double got = j.at("metrics").at(keys[i]).get<double>() * 100.0;
        if (std::abs(got - expected_pct[i]) > 0.01) {
            std::printf("    %s: got %.4f, expected %.2f\n", keys[i], got, expected_pct[i]);
            return false;
        }
    }
    std::printf("    counts (%s) -> all seven metrics within 0.01 pp in %.0f ms\n", counts.c_str(),
                elapsed * 1e3);
    return true;
}

bool criterion_1_metrics_oracle() {
    return metrics_row("213 100 1 306", {83.71, 68.05, 99.67, 99.53, 80.83, 71.22, 67.52}) &&
           metrics_row("295 12 25 288", {94.03, 96.09, 92.01, 92.19, 94.10, 88.15, 88.07});
}

// ---------------------------------------------------------------------------
// 2. Solver closed form and objective monotonicity.

bool criterion_2_solver() {
    PatchSet pair;
    pair.dim = 1;
    pair.features = {1.0f, -1.0f};
    pair.labels = {1, -1};
    const SvmModel m = train_l2svm(pair, 1.0);
    if (!check(std::abs(m.weights[0] - 2.0 / 3.0) < 1e-4,
               "closed-form weight 2/3 missed by more than 1e-4")) {
        return false;
    }
    std::printf("    symmetric pair: w = %.6f (target 2/3)\n", m.weights[0]);

    rng::SplitMix64 g(1201);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 6 + g.next_below(40);
        const std::size_t dim = 1 + g.next_below(10);
        PatchSet d;
        d.dim = dim;
        d.features.resize(n * dim);
        d.labels.resize(n);
        for (auto& v : d.features) v = static_cast<float>(g.next_unit());
        for (std::size_t i = 0; i < n; ++i) d.labels[i] = i % 2 == 0 ? 1 : -1;

        const SvmModel model = train_l2svm(d, std::pow(10.0, g.next_in(-1.0, 1.0)), 1e-6, 400);
        for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
            if (model.objective_trace[i] > model.objective_trace[i - 1]) {
                std::printf("    objective increased at trial %d, step %zu\n", trial, i);
                return false;
            }
        }
    }
    std::printf("    objective non-increasing on 50 random problems\n");
    return true;
}

// ---------------------------------------------------------------------------
// 3. Parallel convolution matches the naive serial oracle.

bool criterion_3_conv_oracle() {
    const double t0 = now_s();
    rng::SplitMix64 g(1301);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int c = 1 + static_cast<int>(g.next_below(5));
        const int k = 1 + static_cast<int>(g.next_below(5));
        const int h = k + static_cast<int>(g.next_below(20));
        const int w = k + static_cast<int>(g.next_below(20));
        const int stride = 1 + static_cast<int>(g.next_below(3));
        const int nf = 1 + static_cast<int>(g.next_below(8));
        const int p = static_cast<int>(g.next_below(3));

        Tensor3 t(h, w, c);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t.data()[i] = static_cast<float>(g.next_in(-1.0, 1.0));
        }
        FilterBank bank(nf, k, c, stride);
        for (auto& v : bank.weights) v = static_cast<float>(g.next_in(-1.0, 1.0));

        const Tensor3 fast = conv2d(t, bank, p);
        const Tensor3 slow = ref::conv2d(t, bank, p);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            worst = std::max(worst, std::abs(static_cast<double>(fast.data()[i]) - slow.data()[i]));
        }
        if (worst >= 1e-5) {
            std::printf("    mismatch %.3g at trial %d\n", worst, trial);
            return false;
        }
    }
    const double elapsed = now_s() - t0;
    std::printf("    100 random geometries, max |diff| %.3g, %.1f s\n", worst, elapsed);
    return check(elapsed < 30.0, "conv oracle suite took 30 s or longer");
}

// ---------------------------------------------------------------------------
// 4. Shape pipeline of the default architecture.

bool criterion_4_shapes() {
    const auto arch = default_architecture();
    rng::SplitMix64 g(1401);
    Tensor3 t(128, 128, 1);
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(g.next_unit());

    const int expected_conv[3] = {61, 28, 13};
    const int expected_pool[3] = {30, 13, 6};
    const std::size_t expected_head[3] = {36000, 21632, 9216};
    int in_channels = 1;
    for (int d = 0; d < 3; ++d) {
        FilterBank bank(arch[d].n_filters, arch[d].kernel, in_channels, arch[d].stride);
        for (auto& v : bank.weights) v = static_cast<float>(g.next_in(-0.1, 0.1));
        const Tensor3 conv = conv2d(t, bank, 0);
        if (!check(conv.height() == expected_conv[d] && conv.width() == expected_conv[d],
                   "conv output size mismatch")) {
            std::printf("    block %d conv: %dx%d, expected %d\n", d + 1, conv.height(),
                        conv.width(), expected_conv[d]);
            return false;
        }
        t = pool(relu(conv), arch[d].pool);
        if (!check(t.height() == expected_pool[d] && t.width() == expected_pool[d],
                   "pool output size mismatch")) {
            return false;
        }
        if (!check(flatten(t).size() == expected_head[d], "flattened head dimension mismatch")) {
            return false;
        }
        in_channels = arch[d].n_filters;
    }
    std::printf("    spatial sizes 61, 30, 28, 13, 13, 6; head dims 36000, 21632, 9216\n");
    return true;
}

// ---------------------------------------------------------------------------
// 5. Trapezoidal AUC equals the pair-counting statistic.

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0;
    std::size_t np = 0, nn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        ++np;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] == 1) continue;
            wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    }
    for (int v : y) nn += v != 1;
    return wins / (static_cast<double>(np) * static_cast<double>(nn));
}

bool criterion_5_auc_oracle() {
    rng::SplitMix64 g(1501);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 8 + g.next_below(40);
        std::vector<double> scores(n);
        std::vector<int> truths(n);
        for (std::size_t i = 0; i < n; ++i) {
            // A coarse grid keeps ties frequent.
            scores[i] = static_cast<double>(g.next_below(10)) / 4.0 - 1.0;
            truths[i] = g.next_below(2) == 0 ? 1 : -1;
        }
        truths[0] = 1;
        truths[1] = -1;
        worst = std::max(worst, std::abs(roc_auc(scores, truths, 1).auc -
                                         pair_count_auc(scores, truths)));
        if (worst >= 1e-12) {
            std::printf("    AUC deviates by %.3g at trial %d\n", worst, trial);
            return false;
        }
    }
    std::printf("    200 random score sets, max |diff| %.3g\n", worst);
    return true;
}

// ---------------------------------------------------------------------------
// 6. End-to-end synthetic texture classification, single-threaded.

double accuracy_at(const CsvmNetwork& net, const std::vector<LabeledTensor>& test, int depth) {
    int correct = 0;
    for (const auto& s : test) {
        correct += infer(net, s.tensor, depth).first == s.label;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

bool criterion_6_end_to_end() {
#ifdef _OPENMP
    const int saved_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const double t0 = now_s();
    const auto train = testsupport::make_stripes(200, 601);
    const auto test = testsupport::make_stripes(100, 602);

    // Pinned configuration for this dataset. The stripes task has identical
    // per-pixel statistics in both classes, so filter learning only works
    // through the per-filter random subsets; C = 0.1 keeps the filters
    // regularized enough to survive the +-0.2 noise at depth 3.
    TrainConfig cfg;
    cfg.master_seed = 29;
    cfg.svm_c = 0.1;
    cfg.subset_per_class = 200;
    const CsvmNetwork net = train_network(train, default_architecture(), cfg);

    const double acc1 = accuracy_at(net, test, 1);
    const double acc3 = accuracy_at(net, test, 3);
    const double elapsed = now_s() - t0;
#ifdef _OPENMP
    omp_set_num_threads(saved_threads);
#endif

    std::printf("    depth-1 accuracy %.1f%%, depth-3 accuracy %.1f%%, %.0f s single-threaded\n",
                acc1 * 100.0, acc3 * 100.0, elapsed);
    bool ok = check(acc3 >= 0.95, "depth-3 accuracy below 95%");
    ok &= check(acc3 >= acc1 - 0.02, "depth-3 accuracy more than 2 pp below depth-1");
    ok &= check(elapsed < 300.0, "training exceeded 5 minutes single-threaded");
    return ok;
}

// ---------------------------------------------------------------------------
// 7. Byte-identical model files across reruns and thread counts.

bool criterion_7_determinism() {
    const fs::path data = g_work / "det_data";
    if (!fs::exists(data / "vertical")) {
        testsupport::write_stripes_dataset(data.string(), 16, 7001);
    }

    const json config{
        {"dataset_root", data.string()},
        {"split_file", (g_work / "det_split.json").string()},
        {"input_size", {128, 128}},
        {"positive_class", "vertical"},
        {"train_fraction", 0.75},
        {"train",
         {{"svm_c", 1.0},
          {"tol", 1e-6},
          {"max_iter", 150},
          {"per_image_patches", 10},
          {"subset_per_class", 120},
          {"patch_source_images", 30},
          {"master_seed", 77}}},
    };
    const fs::path cfg_path = g_work / "det_config.json";
    std::ofstream(cfg_path) << config.dump(2);

    if (!check(run_cli("split --config " + cfg_path.string() + " --out " +
                       (g_work / "det_split.json").string()) == 0,
               "split command failed")) {
        return false;
    }

    const char* runs[][2] = {{"--threads 1", "m1.csvm"},
                             {"--threads 2", "m2.csvm"},
                             {"--threads 2", "m3.csvm"}};
    for (const auto& [threads, name] : runs) {
        const std::string out = (g_work / name).string();
        if (!check(run_cli(std::string("train ") + threads + " --config " + cfg_path.string() +
                           " --out " + out) == 0,
                   "train command failed")) {
            return false;
        }
    }
    const std::string a = slurp(g_work / "m1.csvm");
    const std::string b = slurp(g_work / "m2.csvm");
    const std::string c = slurp(g_work / "m3.csvm");
    if (!check(!a.empty() && a == b && b == c,
               "model files differ across --threads settings or reruns")) {
        return false;
    }
    std::printf("    three full runs (--threads 1/2/2): identical %zu-byte model files\n",
                a.size());
    return true;
}

// ---------------------------------------------------------------------------
// 8. Optional integration run on a local CT dataset.

bool criterion_8_ct_dataset() {
    const char* root = std::getenv("CSVM_CT_DATASET");
    if (!root || !*root) {
        std::printf("    skipped: CSVM_CT_DATASET not set (informational run only)\n");
        return true;
    }

    const json config{
        {"dataset_root", std::string(root)},
        {"split_file", (g_work / "ct_split.json").string()},
        {"input_size", {128, 128}},
        {"positive_class", "COVID"},
        {"train_fraction", 0.75},
    };
    const fs::path cfg_path = g_work / "ct_config.json";
    std::ofstream(cfg_path) << config.dump(2);

    if (!check(run_cli("split --config " + cfg_path.string() + " --out " +
                       (g_work / "ct_split.json").string()) == 0,
               "split failed on the CT dataset")) {
        return false;
    }
    std::string output;
    if (!check(run_cli("train --config " + cfg_path.string() + " --out " +
                       (g_work / "ct_model.csvm").string(),
                       &output) == 0,
               "training failed on the CT dataset")) {
        std::printf("%s\n", output.c_str());
        return false;
    }
    if (!check(run_cli("eval --config " + cfg_path.string() + " --model " +
                       (g_work / "ct_model.csvm").string() + " --json " +
                       (g_work / "ct_eval.json").string(),
                       &output) == 0,
               "evaluation failed on the CT dataset")) {
        return false;
    }
    std::printf("%s", output.c_str());

    const json j = json::parse(slurp(g_work / "ct_eval.json"));
    const double acc = j.at("metrics").at("acc").get<double>() * 100.0;
    std::printf("    informational: accuracy %.2f%% vs published 94.03%% (delta %+.2f pp, "
                "not asserted)\n",
                acc, acc - 94.03);
    return true;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) g_cli = argv[++i];
        else if (std::strcmp(argv[i], "--work") == 0 && i + 1 < argc) g_work = argv[++i];
    }
    if (g_cli.empty() || g_work.empty()) {
        std::fprintf(stderr, "usage: csvm_acceptance --cli <csvm binary> --work <scratch dir>\n");
        return 2;
    }
    fs::create_directories(g_work);

    struct Criterion {
        const char* name;
        std::function<bool()> run;
    };
    const Criterion criteria[] = {
        {"metrics oracle reproduces both published table rows (+-0.01 pp, < 1 s)",
         criterion_1_metrics_oracle},
        {"solver closed form w=2/3 (1e-4) and monotone objective on 50 problems",
         criterion_2_solver},
        {"conv2d matches the naive serial oracle on 100 cases (1e-5, < 30 s)",
         criterion_3_conv_oracle},
        {"default architecture shape pipeline: 61/30/28/13/13/6, heads 36000/21632/9216",
         criterion_4_shapes},
        {"trapezoidal AUC equals pair-counting statistic on 200 sets (1e-12)",
         criterion_5_auc_oracle},
        {"synthetic stripes: depth-3 accuracy >= 95% in < 5 min single-threaded, "
         ">= depth-1 - 2 pp",
         criterion_6_end_to_end},
        {"byte-identical model files across seeds-fixed reruns and --threads settings",
         criterion_7_determinism},
        {"optional CT-dataset integration run (env CSVM_CT_DATASET)", criterion_8_ct_dataset},
    };

    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", index, c.name);
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %d criteria passed\n", index);
    return 0;
}
