#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csvm/tensor.hpp"

namespace csvm {

struct ImageSample {
    Tensor3 tensor;       // single channel, values in [0, 1]
    int label = 0;        // +1 positive class, -1 negative class
    std::string id;       // "<class_dir>/<file_name>", unique within a dataset
};

struct Dataset {
    std::vector<ImageSample> samples;
    std::array<std::string, 2> class_names;  // [0] maps to +1, [1] to -1

    std::size_t count(int label) const;
};

struct SplitSpec {
    std::uint64_t seed = 0;
    double train_fraction = 0.75;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

// Decodes a PNG/JPEG image, converts to grayscale in [0,1] (8/16-bit inputs
// normalized by the max representable value, color via 0.299R + 0.587G +
// 0.114B), and resizes to target_h x target_w with bilinear interpolation.
Tensor3 load_image(const std::string& path, int target_h, int target_w);

// Loads <root>/<class_name>/*.{png,jpg,jpeg}. The root must contain exactly
// two class subdirectories, one of which is positive_class. Samples are
// ordered lexicographically by (class dir, file name) regardless of decode
// parallelism.
Dataset load_dataset(const std::string& root, const std::string& positive_class, int target_h,
                     int target_w);

// Stratified split: per class, test count = floor((1 - train_fraction) * n),
// membership chosen by a seeded shuffle of that class. Deterministic for a
// fixed (dataset order, seed).
SplitSpec split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed);

void save_split(const SplitSpec& split, const std::string& path);
SplitSpec load_split(const std::string& path);

// Resolves the split against a dataset, validating that the id lists form an
// exact partition. Returns (train indices, test indices) in dataset order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> apply_split(const Dataset& ds,
                                                                          const SplitSpec& split);

} // namespace csvm
