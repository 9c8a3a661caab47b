#include "csvm/tensor.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "csvm/error.hpp"

namespace csvm {

namespace {

void check_dims(int height, int width, int channels) {
    if (height < 1 || width < 1 || channels < 1) {
        throw InvalidArgument("tensor dims must be positive, got " +
                              std::to_string(height) + "x" + std::to_string(width) +
                              "x" + std::to_string(channels));
    }
}

} // namespace

Tensor3::Tensor3(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
    check_dims(height, width, channels);
    data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

Tensor3::Tensor3(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    check_dims(height, width, channels);
    const std::size_t expected = static_cast<std::size_t>(height) * width * channels;
    if (data_.size() != expected) {
        throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                              " does not match dims (expected " +
                              std::to_string(expected) + ")");
    }
}

bool Tensor3::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::vector<float> flatten(const Tensor3& t) {
    return t.storage();
}

Tensor3 reshape(int height, int width, int channels, std::vector<float> values) {
    return Tensor3(height, width, channels, std::move(values));
}

} // namespace csvm
