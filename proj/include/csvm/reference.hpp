#pragma once

#include "csvm/layers.hpp"
#include "csvm/tensor.hpp"

// Serial reference kernels. Straightforward nested loops, no OpenMP, no
// materialized padding; kept as the independent check for the parallel
// kernels in layers.hpp and as the baseline for the kernel benchmark.
namespace csvm::ref {

Tensor3 conv2d(const Tensor3& t, const FilterBank& bank, int p);
Tensor3 pool(const Tensor3& t, const PoolSpec& spec);
Tensor3 relu(const Tensor3& t);

} // namespace csvm::ref
