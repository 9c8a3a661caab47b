#include "csvm/patch_sampler.hpp"

#include <algorithm>
#include <string>

#include "csvm/error.hpp"
#include "csvm/rng.hpp"

namespace csvm {

PatchSet extract_patches(const std::vector<LabeledTensor>& samples, int k, int per_image,
                         std::uint64_t seed) {
    if (samples.empty()) throw InvalidInput("extract_patches: no samples");
    if (k < 1) throw InvalidArgument("patch size must be positive");
    if (per_image < 1) throw InvalidArgument("per_image must be positive");

    const int channels = samples.front().tensor.channels();
    for (const auto& s : samples) {
        if (s.tensor.height() < k || s.tensor.width() < k) {
            throw InvalidGeometry("patch size " + std::to_string(k) + " exceeds input " +
                                  std::to_string(s.tensor.height()) + "x" +
                                  std::to_string(s.tensor.width()));
        }
        if (s.tensor.channels() != channels) {
            throw InvalidInput("extract_patches: mixed channel counts");
        }
    }

    PatchSet out;
    out.dim = static_cast<std::size_t>(k) * k * channels;
    const std::size_t n_patches = samples.size() * static_cast<std::size_t>(per_image);
    out.features.resize(n_patches * out.dim);
    out.labels.resize(n_patches);
    out.origins.resize(n_patches);

    const std::ptrdiff_t n_samples = static_cast<std::ptrdiff_t>(samples.size());
    const int span = k * channels;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < n_samples; ++si) {
        const Tensor3& t = samples[static_cast<std::size_t>(si)].tensor;
        const int label = samples[static_cast<std::size_t>(si)].label;
        rng::SplitMix64 stream(rng::derive(seed, rng::kTagPatchExtract, static_cast<std::uint64_t>(si)));
        const std::uint64_t y_range = static_cast<std::uint64_t>(t.height() - k + 1);
        const std::uint64_t x_range = static_cast<std::uint64_t>(t.width() - k + 1);

        for (int p = 0; p < per_image; ++p) {
            const int y = static_cast<int>(stream.next_below(y_range));
            const int x = static_cast<int>(stream.next_below(x_range));
            const std::size_t row = static_cast<std::size_t>(si) * per_image + p;
            float* dst = out.features.data() + row * out.dim;
            for (int ky = 0; ky < k; ++ky) {
                std::copy_n(t.data() + t.index(y + ky, x, 0), span, dst + ky * span);
            }
            out.labels[row] = label;
            out.origins[row] = {static_cast<std::size_t>(si), y, x};
        }
    }
    return out;
}

PatchSet sample_subset(const PatchSet& ps, std::size_t n_per_class, std::uint64_t seed,
                       std::vector<std::size_t>* picked_rows) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ps.count(); ++i) {
        (ps.labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw DegenerateLabels("sample_subset: patch set contains a single class");
    }

    std::vector<std::size_t> picked;
    picked.reserve(2 * n_per_class);
    int class_idx = 0;
    for (auto* cls : {&pos, &neg}) {
        rng::SplitMix64 stream(rng::derive(seed, rng::kTagFilterSubset,
                                           static_cast<std::uint64_t>(class_idx++)));
        std::vector<std::size_t> order = *cls;
        rng::shuffle(order, stream);
        const std::size_t take = std::min(n_per_class, order.size());
        picked.insert(picked.end(), order.begin(), order.begin() + take);
    }
    std::sort(picked.begin(), picked.end());

    PatchSet out;
    out.dim = ps.dim;
    out.features.resize(picked.size() * ps.dim);
    out.labels.resize(picked.size());
    if (!ps.origins.empty()) out.origins.resize(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) {
        std::copy_n(ps.row(picked[i]), ps.dim, out.features.data() + i * ps.dim);
        out.labels[i] = ps.labels[picked[i]];
        if (!ps.origins.empty()) out.origins[i] = ps.origins[picked[i]];
    }
    if (picked_rows) *picked_rows = std::move(picked);
    return out;
}

} // namespace csvm
