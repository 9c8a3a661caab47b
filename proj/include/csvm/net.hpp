#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "csvm/layers.hpp"
#include "csvm/linsvm.hpp"
#include "csvm/tensor.hpp"

namespace csvm {

enum class Activation { Relu, Sigmoid, TanhHalf };

struct BlockSpec {
    int n_filters = 1;
    int kernel = 1;
    int stride = 1;
    PoolSpec pool;
    Activation activation = Activation::Relu;
};

struct TrainConfig {
    double svm_c = 1.0;
    double tol = 1e-6;
    int max_iter = 1000;
    int per_image_patches = 30;    // patches drawn from each source image
    int subset_per_class = 500;    // per-filter training subset size per class
    int patch_source_images = 200; // images patches are drawn from, blocks 2+
    std::uint64_t master_seed = 1;
};

struct Block {
    BlockSpec spec;
    FilterBank bank;
};

// Feed-forward network of conv -> activation -> pool blocks whose filters
// are SVM weight vectors, plus one linear-SVM head per depth: heads[d] is
// trained on the flattened output of block d and classifies at depth d+1.
struct CsvmNetwork {
    int input_height = 128;
    int input_width = 128;
    int input_channels = 1;
    std::vector<Block> blocks;
    std::vector<SvmModel> heads;
    TrainConfig train_config;
    std::array<std::string, 2> class_names{"positive", "negative"};  // [0] is +1

    int depth() const { return static_cast<int>(blocks.size()); }
};

struct BlockTiming {
    int depth = 0;        // 1-based
    double block_s = 0;   // patch extraction, filter SVMs, forward pass
    double head_s = 0;    // head SVM on the flattened block outputs
};
using TrainLog = std::function<void(const BlockTiming&)>;

// pool(activation(conv2d(t, bank, p=0)), spec.pool)
Tensor3 block_forward(const Tensor3& t, const BlockSpec& spec, const FilterBank& bank);

// Learns one filter bank: extracts patches from (a subset of) the inputs,
// trains one SVM per filter on its own seeded patch subset, reshapes the
// weight vectors into the bank, and forwards all inputs through the block.
std::pair<FilterBank, std::vector<LabeledTensor>> train_block(
    const std::vector<LabeledTensor>& inputs, const BlockSpec& spec, const TrainConfig& cfg,
    int depth);

// Trains blocks sequentially; after each block trains a head on the
// flattened outputs of every training sample.
CsvmNetwork train_network(const std::vector<LabeledTensor>& train,
                          const std::vector<BlockSpec>& arch, const TrainConfig& cfg,
                          const TrainLog& log = {});

// Forward through blocks 1..depth, flatten, head decision. Returns
// (label, score) with the +1 / -1 label convention.
std::pair<int, double> infer(const CsvmNetwork& net, const Tensor3& t, int depth);

// The default three-block architecture: 40 7x7 stride-2 filters, 128 3x3
// stride-1 filters, 256 1x1 stride-1 filters, each followed by ReLU and
// 3x3 stride-2 max pooling.
std::vector<BlockSpec> default_architecture();

} // namespace csvm
