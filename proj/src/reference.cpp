#include "csvm/reference.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "csvm/error.hpp"

namespace csvm::ref {

Tensor3 conv2d(const Tensor3& t, const FilterBank& bank, int p) {
    if (t.channels() != bank.in_channels) {
        throw InvalidInput("ref::conv2d channel mismatch");
    }
    const int out_h = conv_output_size(t.height(), p, bank.kernel, bank.stride);
    const int out_w = conv_output_size(t.width(), p, bank.kernel, bank.stride);
    Tensor3 out(out_h, out_w, bank.n_filters);

    for (int f = 0; f < bank.n_filters; ++f) {
        const float* flt = bank.filter(f);
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double acc = 0.0;
                for (int ky = 0; ky < bank.kernel; ++ky) {
                    for (int kx = 0; kx < bank.kernel; ++kx) {
                        // Position in the padded image, shifted back by p.
                        const int iy = y * bank.stride + ky - p;
                        const int ix = x * bank.stride + kx - p;
                        if (iy < 0 || iy >= t.height() || ix < 0 || ix >= t.width()) {
                            continue;  // zero padding contributes nothing
                        }
                        for (int c = 0; c < bank.in_channels; ++c) {
                            acc += static_cast<double>(t.at(iy, ix, c)) *
                                   flt[(ky * bank.kernel + kx) * bank.in_channels + c];
                        }
                    }
                }
                out.at(y, x, f) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Tensor3 pool(const Tensor3& t, const PoolSpec& spec) {
    if (spec.window > t.height() || spec.window > t.width()) {
        throw InvalidGeometry("ref::pool window larger than input");
    }
    const int out_h = conv_output_size(t.height(), 0, spec.window, spec.stride);
    const int out_w = conv_output_size(t.width(), 0, spec.window, spec.stride);
    Tensor3 out(out_h, out_w, t.channels());

    for (int c = 0; c < t.channels(); ++c) {
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                if (spec.mode == PoolMode::Max) {
                    float best = -std::numeric_limits<float>::infinity();
                    for (int wy = 0; wy < spec.window; ++wy) {
                        for (int wx = 0; wx < spec.window; ++wx) {
                            best = std::max(best, t.at(y * spec.stride + wy, x * spec.stride + wx, c));
                        }
                    }
                    out.at(y, x, c) = best;
                } else {
                    double sum = 0.0;
                    for (int wy = 0; wy < spec.window; ++wy) {
                        for (int wx = 0; wx < spec.window; ++wx) {
                            sum += t.at(y * spec.stride + wy, x * spec.stride + wx, c);
                        }
                    }
                    out.at(y, x, c) = static_cast<float>(sum / (spec.window * spec.window));
                }
            }
        }
    }
    return out;
}

Tensor3 relu(const Tensor3& t) {
    std::vector<float> v = t.storage();
    for (float& z : v) {
        z = std::max(z, 0.0f);
    }
    return Tensor3(t.height(), t.width(), t.channels(), std::move(v));
}

} // namespace csvm::ref
