#include "csvm/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csvm/error.hpp"

namespace csvm {

FilterBank::FilterBank(int n_filters_, int kernel_, int in_channels_, int stride_)
    : n_filters(n_filters_), kernel(kernel_), in_channels(in_channels_), stride(stride_) {
    if (n_filters < 1 || kernel < 1 || in_channels < 1 || stride < 1) {
        throw InvalidArgument("filter bank parameters must be positive");
    }
    weights.assign(static_cast<std::size_t>(n_filters) * filter_len(), 0.0f);
}

int conv_output_size(int n_in, int p, int k, int s) {
    if (n_in < 1 || p < 0 || k < 1 || s < 1) {
        throw InvalidArgument("conv geometry parameters out of range");
    }
    if (n_in + 2 * p < k) {
        throw InvalidGeometry("kernel " + std::to_string(k) + " larger than padded input " +
                              std::to_string(n_in + 2 * p));
    }
    return (n_in + 2 * p - k) / s + 1;
}

Tensor3 zero_pad(const Tensor3& t, int p) {
    if (p < 0) throw InvalidArgument("padding must be non-negative");
    if (p == 0) return t;
    Tensor3 out(t.height() + 2 * p, t.width() + 2 * p, t.channels());
    const std::size_t row_bytes = static_cast<std::size_t>(t.width()) * t.channels();
    for (int y = 0; y < t.height(); ++y) {
        std::copy_n(t.data() + t.index(y, 0, 0), row_bytes, out.data() + out.index(y + p, p, 0));
    }
    return out;
}

Tensor3 conv2d(const Tensor3& t, const FilterBank& bank, int p) {
    if (t.channels() != bank.in_channels) {
        throw InvalidInput("conv2d channel mismatch: input has " + std::to_string(t.channels()) +
                           ", bank expects " + std::to_string(bank.in_channels));
    }
    const int out_h = conv_output_size(t.height(), p, bank.kernel, bank.stride);
    const int out_w = conv_output_size(t.width(), p, bank.kernel, bank.stride);

    const Tensor3 padded = zero_pad(t, p);
    const int k = bank.kernel;
    const int s = bank.stride;
    const int nf = bank.n_filters;
    const int c = bank.in_channels;
    const int span = k * c;  // one kernel row covers k contiguous columns, all channels

    Tensor3 out(out_h, out_w, nf);
    const float* in = padded.data();
    const float* wts = bank.weights.data();
    float* dst = out.data();
    const std::size_t in_row = static_cast<std::size_t>(padded.width()) * c;
    const std::size_t flt_len = bank.filter_len();

#pragma omp parallel for collapse(2) schedule(static)
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const float* window = in + static_cast<std::size_t>(y) * s * in_row +
                                  static_cast<std::size_t>(x) * s * c;
            float* o = dst + (static_cast<std::size_t>(y) * out_w + x) * nf;
            for (int f = 0; f < nf; ++f) {
                const float* flt = wts + static_cast<std::size_t>(f) * flt_len;
                double acc = 0.0;
                for (int ky = 0; ky < k; ++ky) {
                    const float* in_row_ptr = window + static_cast<std::size_t>(ky) * in_row;
                    const float* flt_row_ptr = flt + static_cast<std::size_t>(ky) * span;
#pragma omp simd reduction(+ : acc)
                    for (int j = 0; j < span; ++j) {
                        acc += static_cast<double>(in_row_ptr[j]) * flt_row_ptr[j];
                    }
                }
                o[f] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

namespace {

template <typename Fn>
Tensor3 elementwise(const Tensor3& t, Fn fn) {
    Tensor3 out(t.height(), t.width(), t.channels());
    const float* src = t.data();
    float* dst = out.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        dst[i] = fn(src[i]);
    }
    return out;
}

} // namespace

Tensor3 relu(const Tensor3& t) {
    return elementwise(t, [](float z) { return z > 0.0f ? z : 0.0f; });
}

Tensor3 sigmoid(const Tensor3& t) {
    return elementwise(t, [](float z) {
        return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(z))));
    });
}

Tensor3 tanh_half(const Tensor3& t) {
    return elementwise(t, [](float z) {
        const double e = std::exp(-static_cast<double>(z));
        return static_cast<float>((1.0 - e) / (1.0 + e));
    });
}

Tensor3 pool(const Tensor3& t, const PoolSpec& spec) {
    if (spec.window < 1 || spec.stride < 1) {
        throw InvalidArgument("pool window and stride must be positive");
    }
    if (spec.window > t.height() || spec.window > t.width()) {
        throw InvalidGeometry("pool window " + std::to_string(spec.window) +
                              " larger than input " + std::to_string(t.height()) + "x" +
                              std::to_string(t.width()));
    }
    const int out_h = conv_output_size(t.height(), 0, spec.window, spec.stride);
    const int out_w = conv_output_size(t.width(), 0, spec.window, spec.stride);
    const int c = t.channels();
    const int w = spec.window;
    const int s = spec.stride;
    const bool take_max = spec.mode == PoolMode::Max;
    const double inv_area = 1.0 / (static_cast<double>(w) * w);

    Tensor3 out(out_h, out_w, c);
    const float* in = t.data();
    float* dst = out.data();
    const std::size_t in_row = static_cast<std::size_t>(t.width()) * c;

#pragma omp parallel
    {
        std::vector<double> acc(c);
        std::vector<float> mx(c);
#pragma omp for collapse(2) schedule(static)
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                const float* window = in + static_cast<std::size_t>(y) * s * in_row +
                                      static_cast<std::size_t>(x) * s * c;
                if (take_max) {
                    std::copy_n(window, c, mx.data());
                    for (int wy = 0; wy < w; ++wy) {
                        const float* row = window + static_cast<std::size_t>(wy) * in_row;
                        for (int wx = (wy == 0 ? 1 : 0); wx < w; ++wx) {
                            const float* px = row + static_cast<std::size_t>(wx) * c;
                            for (int ch = 0; ch < c; ++ch) {
                                if (px[ch] > mx[ch]) mx[ch] = px[ch];
                            }
                        }
                    }
                    std::copy_n(mx.data(), c, dst + (static_cast<std::size_t>(y) * out_w + x) * c);
                } else {
                    std::fill(acc.begin(), acc.end(), 0.0);
                    for (int wy = 0; wy < w; ++wy) {
                        const float* row = window + static_cast<std::size_t>(wy) * in_row;
                        for (int wx = 0; wx < w; ++wx) {
                            const float* px = row + static_cast<std::size_t>(wx) * c;
                            for (int ch = 0; ch < c; ++ch) {
                                acc[ch] += px[ch];
                            }
                        }
                    }
                    float* o = dst + (static_cast<std::size_t>(y) * out_w + x) * c;
                    for (int ch = 0; ch < c; ++ch) {
                        o[ch] = static_cast<float>(acc[ch] * inv_area);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace csvm
