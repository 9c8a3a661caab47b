#pragma once

#include <cstdint>
#include <vector>

#include "csvm/linsvm.hpp"
#include "csvm/tensor.hpp"

namespace csvm {

// Extracts per_image patches of size k x k x C from each sample at uniformly
// random valid top-left positions. Each patch is flattened in canonical
// tensor order and labeled with its parent image's label. The RNG stream for
// sample i derives from (seed, i), so extraction parallelizes across images
// without affecting results.
PatchSet extract_patches(const std::vector<LabeledTensor>& samples, int k, int per_image,
                         std::uint64_t seed);

// Draws min(n_per_class, available) patches per class uniformly without
// replacement. Selected rows are returned in ascending original-row order,
// so an exhausted class yields the same rows for every seed. picked_rows,
// when given, receives the selected original row indices.
PatchSet sample_subset(const PatchSet& ps, std::size_t n_per_class, std::uint64_t seed,
                       std::vector<std::size_t>* picked_rows = nullptr);

} // namespace csvm
