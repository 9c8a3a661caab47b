#pragma once

#include <cstddef>
#include <vector>

#include "csvm/tensor.hpp"

namespace csvm {

enum class PoolMode { Max, Mean };

struct PoolSpec {
    int window = 2;
    int stride = 2;
    PoolMode mode = PoolMode::Max;
};

// A stack of n_filters convolution kernels of shape kernel x kernel x
// in_channels. Each filter is stored flat in the same (row, column, channel)
// order as Tensor3, so a trained SVM weight vector drops in verbatim.
struct FilterBank {
    int n_filters = 0;
    int kernel = 0;
    int in_channels = 0;
    int stride = 1;
    std::vector<float> weights;  // n_filters * kernel * kernel * in_channels

    FilterBank() = default;
    FilterBank(int n_filters, int kernel, int in_channels, int stride);

    std::size_t filter_len() const {
        return static_cast<std::size_t>(kernel) * kernel * in_channels;
    }
    const float* filter(int f) const { return weights.data() + f * filter_len(); }
    float* filter(int f) { return weights.data() + f * filter_len(); }
};

// floor((n_in + 2p - k) / s) + 1. Floor division keeps every window inside
// the (padded) input; geometry that admits no window at all is an error.
int conv_output_size(int n_in, int p, int k, int s);

// (H+2p) x (W+2p) x C tensor with t centered and a zero border of width p.
Tensor3 zero_pad(const Tensor3& t, int p);

// Cross-correlation of t (zero-padded by p) with every filter in the bank;
// no kernel flip, no bias. Output is N_out x N_out' x n_filters with the
// spatial dims given by conv_output_size. Window dot products accumulate
// in 64-bit.
Tensor3 conv2d(const Tensor3& t, const FilterBank& bank, int p);

// Elementwise max(0, z).
Tensor3 relu(const Tensor3& t);

// Elementwise 1 / (1 + e^-z).
Tensor3 sigmoid(const Tensor3& t);

// Elementwise (1 - e^-z) / (1 + e^-z), which equals tanh(z/2).
Tensor3 tanh_half(const Tensor3& t);

// Sliding-window pooling per channel; windows never read outside the input.
Tensor3 pool(const Tensor3& t, const PoolSpec& spec);

} // namespace csvm
