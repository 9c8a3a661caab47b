#include "stripes.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <opencv2/imgcodecs.hpp>

#include "csvm/rng.hpp"

namespace csvm::testsupport {

namespace {

constexpr std::uint64_t kTagStripes = 0x57125u;

Tensor3 one_stripe_image(std::uint64_t stream_seed, bool vertical, int h, int w, int period,
                         double noise) {
    rng::SplitMix64 g(stream_seed);
    const int phase = static_cast<int>(g.next_below(static_cast<std::uint64_t>(period)));
    Tensor3 t(h, w, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int coord = vertical ? x : y;
            const float band = ((coord + phase) % period) < period / 2 ? 0.25f : -0.25f;
            const float jitter = static_cast<float>(g.next_in(-noise, noise));
            t.at(y, x, 0) = 0.5f + band + jitter;
        }
    }
    return t;
}

} // namespace

std::vector<LabeledTensor> make_stripes(int n, std::uint64_t seed, int height, int width,
                                        int period, double noise) {
    std::vector<LabeledTensor> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const bool vertical = i % 2 == 0;
        out.push_back({one_stripe_image(rng::derive(seed, kTagStripes, i), vertical, height, width,
                                        period, noise),
                       vertical ? 1 : -1});
    }
    return out;
}

void write_stripes_dataset(const std::string& dir, int per_class, std::uint64_t seed, int height,
                           int width, int period) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "vertical");
    fs::create_directories(fs::path(dir) / "horizontal");

    const auto samples = make_stripes(2 * per_class, seed, height, width, period);
    int counter[2] = {0, 0};
    for (const auto& s : samples) {
        cv::Mat img(height, width, CV_8UC1);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const float v = std::clamp(s.tensor.at(y, x, 0), 0.0f, 1.0f);
                img.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
        }
        const char* cls = s.label == 1 ? "vertical" : "horizontal";
        char name[32];
        std::snprintf(name, sizeof(name), "img_%03d.png", counter[s.label == 1 ? 0 : 1]++);
        cv::imwrite((fs::path(dir) / cls / name).string(), img);
    }
}

} // namespace csvm::testsupport
