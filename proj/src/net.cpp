#include "csvm/net.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "csvm/error.hpp"
#include "csvm/patch_sampler.hpp"
#include "csvm/rng.hpp"

namespace csvm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Tensor3 apply_activation(const Tensor3& t, Activation activation) {
    switch (activation) {
        case Activation::Relu: return relu(t);
        case Activation::Sigmoid: return sigmoid(t);
        case Activation::TanhHalf: return tanh_half(t);
    }
    throw InvalidArgument("unknown activation");
}

// Images whose patches feed the filter SVMs: every input for the first
// block, a seeded subset of patch_source_images inputs for deeper blocks.
std::vector<LabeledTensor> patch_sources(const std::vector<LabeledTensor>& inputs,
                                         const TrainConfig& cfg, int depth) {
    if (depth <= 1 || inputs.size() <= static_cast<std::size_t>(cfg.patch_source_images)) {
        return inputs;
    }
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    rng::SplitMix64 stream(
        rng::derive(cfg.master_seed, rng::kTagPatchSource, static_cast<std::uint64_t>(depth)));
    rng::shuffle(order, stream);
    order.resize(static_cast<std::size_t>(cfg.patch_source_images));
    std::sort(order.begin(), order.end());
    std::vector<LabeledTensor> picked;
    picked.reserve(order.size());
    for (std::size_t i : order) picked.push_back(inputs[i]);
    return picked;
}

} // namespace

Tensor3 block_forward(const Tensor3& t, const BlockSpec& spec, const FilterBank& bank) {
    return pool(apply_activation(conv2d(t, bank, 0), spec.activation), spec.pool);
}

std::pair<FilterBank, std::vector<LabeledTensor>> train_block(
    const std::vector<LabeledTensor>& inputs, const BlockSpec& spec, const TrainConfig& cfg,
    int depth) {
    if (inputs.empty()) throw InvalidInput("train_block: no inputs");

    const std::vector<LabeledTensor> sources = patch_sources(inputs, cfg, depth);
    const PatchSet patches =
        extract_patches(sources, spec.kernel, cfg.per_image_patches,
                        rng::derive(cfg.master_seed, rng::kTagPatchExtract,
                                    static_cast<std::uint64_t>(depth)));

    const int channels = inputs.front().tensor.channels();
    FilterBank bank(spec.n_filters, spec.kernel, channels, spec.stride);

    // One SVM per filter, each on its own (master_seed, depth, filter) patch
    // subset. Filters are independent, so this loop parallelizes freely.
    std::exception_ptr error;
    const std::ptrdiff_t nf = spec.n_filters;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t f = 0; f < nf; ++f) {
        try {
            const std::uint64_t stream =
                rng::derive(rng::derive(cfg.master_seed, rng::kTagFilterSubset,
                                        static_cast<std::uint64_t>(depth)),
                            rng::kTagFilterSubset, static_cast<std::uint64_t>(f));
            const PatchSet subset =
                sample_subset(patches, static_cast<std::size_t>(cfg.subset_per_class), stream);
            const SvmModel model = train_l2svm(subset, cfg.svm_c, cfg.tol, cfg.max_iter);
            std::copy(model.weights.begin(), model.weights.end(), bank.filter(static_cast<int>(f)));
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    std::vector<LabeledTensor> outputs(inputs.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& in = inputs[static_cast<std::size_t>(i)];
            outputs[static_cast<std::size_t>(i)] = {block_forward(in.tensor, spec, bank), in.label};
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return {std::move(bank), std::move(outputs)};
}

CsvmNetwork train_network(const std::vector<LabeledTensor>& train,
                          const std::vector<BlockSpec>& arch, const TrainConfig& cfg,
                          const TrainLog& log) {
    if (arch.empty()) throw InvalidArgument("architecture has no blocks");
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& s : train) {
        (s.label == 1 ? n_pos : n_neg)++;
    }
    if (n_pos < 2 || n_neg < 2) {
        throw DegenerateLabels("training needs at least 2 samples of each class, got " +
                               std::to_string(n_pos) + "/" + std::to_string(n_neg));
    }

    CsvmNetwork net;
    net.input_height = train.front().tensor.height();
    net.input_width = train.front().tensor.width();
    net.input_channels = train.front().tensor.channels();
    net.train_config = cfg;

    std::vector<LabeledTensor> current = train;
    for (std::size_t d = 0; d < arch.size(); ++d) {
        BlockTiming timing;
        timing.depth = static_cast<int>(d) + 1;

        auto t0 = Clock::now();
        auto [bank, outputs] = train_block(current, arch[d], cfg, timing.depth);
        timing.block_s = seconds_since(t0);
        current = std::move(outputs);
        net.blocks.push_back({arch[d], std::move(bank)});

        t0 = Clock::now();
        PatchSet head_data;
        head_data.dim = current.front().tensor.size();
        head_data.features.resize(current.size() * head_data.dim);
        head_data.labels.resize(current.size());
        for (std::size_t i = 0; i < current.size(); ++i) {
            const auto& v = current[i].tensor.storage();
            std::copy(v.begin(), v.end(), head_data.features.begin() + i * head_data.dim);
            head_data.labels[i] = current[i].label;
        }
        net.heads.push_back(train_l2svm(head_data, cfg.svm_c, cfg.tol, cfg.max_iter));
        timing.head_s = seconds_since(t0);

        if (log) log(timing);
    }
    return net;
}

std::pair<int, double> infer(const CsvmNetwork& net, const Tensor3& t, int depth) {
    if (depth < 1 || depth > net.depth()) {
        throw InvalidArgument("depth " + std::to_string(depth) + " out of range [1, " +
                              std::to_string(net.depth()) + "]");
    }
    if (t.height() != net.input_height || t.width() != net.input_width ||
        t.channels() != net.input_channels) {
        throw InvalidInput("input tensor does not match the network input size");
    }
    Tensor3 current = t;
    for (int d = 0; d < depth; ++d) {
        current = block_forward(current, net.blocks[d].spec, net.blocks[d].bank);
    }
    const double score = decision(net.heads[depth - 1], current.data(), current.size());
    return {label_from_score(score), score};
}

std::vector<BlockSpec> default_architecture() {
    const PoolSpec pool{3, 2, PoolMode::Max};
    return {
        {40, 7, 2, pool, Activation::Relu},
        {128, 3, 1, pool, Activation::Relu},
        {256, 1, 1, pool, Activation::Relu},
    };
}

} // namespace csvm
