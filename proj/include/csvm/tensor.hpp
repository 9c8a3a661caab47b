#pragma once

#include <cstddef>
#include <vector>

namespace csvm {

// Dense H x W x C feature map, the unit of all layer I/O.
//
// Canonical layout: row-major over (row, column, channel) with the channel
// index varying fastest. flatten() and all serialization use exactly this
// element order. Tensors are treated as immutable once filled; concurrent
// reads are safe.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int height, int width, int channels);  // zero-filled
    Tensor3(int height, int width, int channels, std::vector<float> data);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    std::size_t index(int y, int x, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }
    float at(int y, int x, int c) const { return data_[index(y, x, c)]; }
    float& at(int y, int x, int c) { return data_[index(y, x, c)]; }

    const float* data() const { return data_.data(); }
    float* data() { return data_.data(); }
    const std::vector<float>& storage() const { return data_; }

    bool same_shape(const Tensor3& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }
    bool all_finite() const;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

// Copy of the elements in canonical order, length H*W*C.
std::vector<float> flatten(const Tensor3& t);

// Inverse of flatten for the given dims; values.size() must equal h*w*c.
Tensor3 reshape(int height, int width, int channels, std::vector<float> values);

// A tensor paired with its class label (+1 / -1).
struct LabeledTensor {
    Tensor3 tensor;
    int label = 0;
};

} // namespace csvm
