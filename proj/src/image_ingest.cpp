#include "csvm/image_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>
#include <opencv2/imgcodecs.hpp>

#include "csvm/error.hpp"
#include "csvm/rng.hpp"

namespace fs = std::filesystem;

namespace csvm {

std::size_t Dataset::count(int label) const {
    std::size_t n = 0;
    for (const auto& s : samples) {
        if (s.label == label) ++n;
    }
    return n;
}

namespace {

// Grayscale plane in [0,1] from an 8- or 16-bit OpenCV image (1/3/4 channels,
// BGR order for color).
std::vector<float> to_unit_gray(const cv::Mat& img, const std::string& path) {
    const int depth = img.depth();
    if (depth != CV_8U && depth != CV_16U) {
        throw DecodeError("unsupported bit depth in " + path);
    }
    const int ch = img.channels();
    if (ch != 1 && ch != 3 && ch != 4) {
        throw DecodeError("unsupported channel count in " + path);
    }
    const double scale = depth == CV_8U ? 1.0 / 255.0 : 1.0 / 65535.0;

    std::vector<float> gray(static_cast<std::size_t>(img.rows) * img.cols);
    for (int y = 0; y < img.rows; ++y) {
        for (int x = 0; x < img.cols; ++x) {
            double v;
            if (ch == 1) {
                v = depth == CV_8U ? img.at<std::uint8_t>(y, x) : img.at<std::uint16_t>(y, x);
            } else {
                double b, g, r;
                if (depth == CV_8U) {
                    const auto* px = img.ptr<std::uint8_t>(y) + static_cast<std::size_t>(x) * ch;
                    b = px[0], g = px[1], r = px[2];
                } else {
                    const auto* px = img.ptr<std::uint16_t>(y) + static_cast<std::size_t>(x) * ch;
                    b = px[0], g = px[1], r = px[2];
                }
                v = 0.299 * r + 0.587 * g + 0.114 * b;
            }
            gray[static_cast<std::size_t>(y) * img.cols + x] = static_cast<float>(v * scale);
        }
    }
    return gray;
}

// Bilinear resampling with pixel-center alignment, coordinates clamped to
// the source raster.
std::vector<float> resize_bilinear(const std::vector<float>& src, int sh, int sw, int th, int tw) {
    std::vector<float> dst(static_cast<std::size_t>(th) * tw);
    const double sy = static_cast<double>(sh) / th;
    const double sx = static_cast<double>(sw) / tw;
    for (int y = 0; y < th; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, sh - 1);
        const double wy = fy - y0;
        for (int x = 0; x < tw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, sw - 1);
            const double wx = fx - x0;
            const double top = (1.0 - wx) * src[static_cast<std::size_t>(y0) * sw + x0] +
                               wx * src[static_cast<std::size_t>(y0) * sw + x1];
            const double bot = (1.0 - wx) * src[static_cast<std::size_t>(y1) * sw + x0] +
                               wx * src[static_cast<std::size_t>(y1) * sw + x1];
            dst[static_cast<std::size_t>(y) * tw + x] =
                static_cast<float>((1.0 - wy) * top + wy * bot);
        }
    }
    return dst;
}

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

} // namespace

Tensor3 load_image(const std::string& path, int target_h, int target_w) {
    if (target_h < 1 || target_w < 1) {
        throw InvalidArgument("target image size must be positive");
    }
    cv::Mat img = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (img.empty()) {
        throw DecodeError("cannot decode image: " + path);
    }
    if (img.rows < 1 || img.cols < 1) {
        throw InvalidInput("zero-dimension image: " + path);
    }
    std::vector<float> gray = to_unit_gray(img, path);
    if (img.rows != target_h || img.cols != target_w) {
        gray = resize_bilinear(gray, img.rows, img.cols, target_h, target_w);
    }
    Tensor3 t(target_h, target_w, 1, std::move(gray));
    if (!t.all_finite()) {
        throw InvalidInput("non-finite pixel values after decoding " + path);
    }
    return t;
}

Dataset load_dataset(const std::string& root, const std::string& positive_class, int target_h,
                     int target_w) {
    if (!fs::is_directory(root)) {
        throw DataError("dataset root is not a directory: " + root);
    }
    std::vector<std::string> class_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) class_dirs.push_back(entry.path().filename().string());
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.size() != 2) {
        throw DataError("dataset root must contain exactly two class directories, found " +
                        std::to_string(class_dirs.size()));
    }
    if (positive_class != class_dirs[0] && positive_class != class_dirs[1]) {
        throw InvalidArgument("positive class '" + positive_class +
                              "' is not a class directory under " + root);
    }
    const std::string negative_class =
        positive_class == class_dirs[0] ? class_dirs[1] : class_dirs[0];

    struct Pending {
        std::string path;
        std::string id;
        int label;
    };
    std::vector<Pending> files;
    for (const auto& cls : class_dirs) {
        std::vector<fs::path> paths;
        for (const auto& entry : fs::directory_iterator(fs::path(root) / cls)) {
            if (entry.is_regular_file() && has_image_extension(entry.path())) {
                paths.push_back(entry.path());
            }
        }
        if (paths.empty()) {
            throw DataError("class directory has no images: " + cls);
        }
        std::sort(paths.begin(), paths.end());
        const int label = cls == positive_class ? 1 : -1;
        for (const auto& p : paths) {
            files.push_back({p.string(), cls + "/" + p.filename().string(), label});
        }
    }

    Dataset ds;
    ds.class_names = {positive_class, negative_class};
    ds.samples.resize(files.size());

    // Decode in parallel; sample order stays the lexicographic file order.
    std::string first_error;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(files.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& f = files[static_cast<std::size_t>(i)];
            ds.samples[static_cast<std::size_t>(i)] = {load_image(f.path, target_h, target_w),
                                                       f.label, f.id};
        } catch (const std::exception& e) {
#pragma omp critical
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) {
        throw DecodeError(first_error);
    }

    std::unordered_set<std::string> seen;
    for (const auto& s : ds.samples) {
        if (!seen.insert(s.id).second) {
            throw DataError("duplicate sample id: " + s.id);
        }
    }
    return ds;
}

SplitSpec split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must be in (0, 1)");
    }
    for (int label : {1, -1}) {
        if (ds.count(label) < 2) {
            throw DataError("each class needs at least 2 samples to split");
        }
    }

    SplitSpec split;
    split.seed = seed;
    split.train_fraction = train_fraction;

    std::vector<char> is_test(ds.samples.size(), 0);
    int class_idx = 0;
    for (int label : {1, -1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.samples.size(); ++i) {
            if (ds.samples[i].label == label) members.push_back(i);
        }
        // The epsilon absorbs representation error in (1 - f) * n when the
        // exact product is an integer.
        const auto n_test = static_cast<std::size_t>(
            std::floor((1.0 - train_fraction) * static_cast<double>(members.size()) + 1e-9));
        rng::SplitMix64 stream(rng::derive(seed, rng::kTagSplit, static_cast<std::uint64_t>(class_idx++)));
        rng::shuffle(members, stream);
        for (std::size_t i = 0; i < n_test; ++i) {
            is_test[members[i]] = 1;
        }
    }
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        (is_test[i] ? split.test_ids : split.train_ids).push_back(ds.samples[i].id);
    }
    return split;
}

void save_split(const SplitSpec& split, const std::string& path) {
    nlohmann::json j{{"seed", split.seed},
                     {"train_fraction", split.train_fraction},
                     {"train_ids", split.train_ids},
                     {"test_ids", split.test_ids}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write split file: " + path);
    out << j.dump(2) << "\n";
}

SplitSpec load_split(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read split file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        SplitSpec split;
        split.seed = j.at("seed").get<std::uint64_t>();
        split.train_fraction = j.at("train_fraction").get<double>();
        split.train_ids = j.at("train_ids").get<std::vector<std::string>>();
        split.test_ids = j.at("test_ids").get<std::vector<std::string>>();
        return split;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed split file " + path + ": " + e.what());
    }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> apply_split(const Dataset& ds,
                                                                          const SplitSpec& split) {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        by_id[ds.samples[i].id] = i;
    }
    std::vector<char> assigned(ds.samples.size(), 0);
    auto resolve = [&](const std::vector<std::string>& ids) {
        std::vector<std::size_t> out;
        out.reserve(ids.size());
        for (const auto& id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw DataError("split id not present in dataset: " + id);
            }
            if (assigned[it->second]) {
                throw DataError("split lists id twice: " + id);
            }
            assigned[it->second] = 1;
            out.push_back(it->second);
        }
        return out;
    };
    auto train = resolve(split.train_ids);
    auto test = resolve(split.test_ids);
    if (train.size() + test.size() != ds.samples.size()) {
        throw DataError("split does not cover the dataset (" +
                        std::to_string(train.size() + test.size()) + " of " +
                        std::to_string(ds.samples.size()) + " ids)");
    }
    return {std::move(train), std::move(test)};
}

} // namespace csvm
