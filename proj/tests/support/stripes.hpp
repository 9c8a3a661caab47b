#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csvm/tensor.hpp"

// Two-class synthetic texture data: vertical stripe bands (+1) vs horizontal
// stripe bands (-1), band contrast 0.5 around mid-gray, additive uniform
// noise of +-0.2, random band phase per image. Values stay inside [0.05,
// 0.95] so the images survive 8-bit quantization.
namespace csvm::testsupport {

std::vector<LabeledTensor> make_stripes(int n, std::uint64_t seed, int height = 128,
                                        int width = 128, int period = 8, double noise = 0.2);

// Writes <dir>/vertical/*.png and <dir>/horizontal/*.png, per_class images
// each; the positive class directory is "vertical".
void write_stripes_dataset(const std::string& dir, int per_class, std::uint64_t seed,
                           int height = 128, int width = 128, int period = 8);

} // namespace csvm::testsupport
