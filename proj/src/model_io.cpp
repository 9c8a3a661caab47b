#include "csvm/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "csvm/error.hpp"

namespace csvm {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'C', 'S', 'V', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

void put_f32_array(std::vector<std::uint8_t>& out, const std::vector<float>& values) {
    for (float f : values) {
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
}

std::vector<float> get_f32_array(const std::uint8_t* p, std::size_t count) {
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
    }
    return values;
}

json pool_to_json(const PoolSpec& p) {
    return {{"mode", pool_mode_name(p.mode)}, {"stride", p.stride}, {"window", p.window}};
}

PoolSpec pool_from_json(const json& j) {
    return {j.at("window").get<int>(), j.at("stride").get<int>(),
            pool_mode_from_name(j.at("mode").get<std::string>())};
}

json block_to_json(const BlockSpec& b) {
    return {{"activation", activation_name(b.activation)},
            {"kernel", b.kernel},
            {"n_filters", b.n_filters},
            {"pool", pool_to_json(b.pool)},
            {"stride", b.stride}};
}

BlockSpec block_from_json(const json& j) {
    BlockSpec b;
    b.n_filters = j.at("n_filters").get<int>();
    b.kernel = j.at("kernel").get<int>();
    b.stride = j.at("stride").get<int>();
    b.pool = pool_from_json(j.at("pool"));
    b.activation = activation_from_name(j.at("activation").get<std::string>());
    return b;
}

json train_to_json(const TrainConfig& c) {
    return {{"master_seed", c.master_seed},
            {"max_iter", c.max_iter},
            {"patch_source_images", c.patch_source_images},
            {"per_image_patches", c.per_image_patches},
            {"subset_per_class", c.subset_per_class},
            {"svm_c", c.svm_c},
            {"tol", c.tol}};
}

TrainConfig train_from_json(const json& j) {
    TrainConfig c;
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.max_iter = j.at("max_iter").get<int>();
    c.patch_source_images = j.at("patch_source_images").get<int>();
    c.per_image_patches = j.at("per_image_patches").get<int>();
    c.subset_per_class = j.at("subset_per_class").get<int>();
    c.svm_c = j.at("svm_c").get<double>();
    c.tol = j.at("tol").get<double>();
    return c;
}

// Expected flattened feature length after each block, from the input dims.
std::vector<std::size_t> head_dims(const CsvmNetwork& net) {
    int h = net.input_height, w = net.input_width;
    std::vector<std::size_t> dims;
    for (const auto& block : net.blocks) {
        h = conv_output_size(h, 0, block.spec.kernel, block.spec.stride);
        w = conv_output_size(w, 0, block.spec.kernel, block.spec.stride);
        h = conv_output_size(h, 0, block.spec.pool.window, block.spec.pool.stride);
        w = conv_output_size(w, 0, block.spec.pool.window, block.spec.pool.stride);
        dims.push_back(static_cast<std::size_t>(h) * w * block.spec.n_filters);
    }
    return dims;
}

} // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::TanhHalf: return "tanh_half";
    }
    throw InvalidArgument("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh_half") return Activation::TanhHalf;
    throw InvalidArgument("unknown activation name: " + name);
}

std::string pool_mode_name(PoolMode m) {
    return m == PoolMode::Max ? "max" : "mean";
}

PoolMode pool_mode_from_name(const std::string& name) {
    if (name == "max") return PoolMode::Max;
    if (name == "mean") return PoolMode::Mean;
    throw InvalidArgument("unknown pool mode: " + name);
}

std::vector<std::uint8_t> serialize_network(const CsvmNetwork& net) {
    if (net.blocks.size() != net.heads.size()) {
        throw InvalidInput("network has " + std::to_string(net.blocks.size()) + " blocks but " +
                           std::to_string(net.heads.size()) + " heads");
    }

    json arrays = json::array();
    std::vector<std::uint8_t> payload;
    std::uint64_t offset = 0;
    auto append_array = [&](const std::string& name, json shape, const std::vector<float>& v) {
        arrays.push_back({{"count", v.size()},
                          {"name", name},
                          {"offset", offset},
                          {"shape", std::move(shape)}});
        put_f32_array(payload, v);
        offset += 4 * v.size();
    };

    for (std::size_t i = 0; i < net.blocks.size(); ++i) {
        const FilterBank& bank = net.blocks[i].bank;
        append_array("bank" + std::to_string(i),
                     json{bank.n_filters, bank.kernel, bank.kernel, bank.in_channels},
                     bank.weights);
    }
    json heads_meta = json::array();
    for (std::size_t i = 0; i < net.heads.size(); ++i) {
        const SvmModel& head = net.heads[i];
        append_array("head" + std::to_string(i), json{head.weights.size()}, head.weights);
        heads_meta.push_back({{"converged", head.converged},
                              {"final_objective", head.final_objective},
                              {"iterations_run", head.iterations_run},
                              {"penalty_c", head.penalty_c}});
    }

    json arch = json::array();
    for (const auto& block : net.blocks) arch.push_back(block_to_json(block.spec));

    const json header{
        {"arch", arch},
        {"arrays", arrays},
        {"classes", {{"negative", net.class_names[1]}, {"positive", net.class_names[0]}}},
        {"heads", heads_meta},
        {"input",
         {{"channels", net.input_channels}, {"height", net.input_height}, {"width", net.input_width}}},
        {"train", train_to_json(net.train_config)},
    };
    const std::string header_str = header.dump();

    std::vector<std::uint8_t> out;
    out.reserve(16 + header_str.size() + payload.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kFormatVersion);
    put_u64(out, header_str.size());
    out.insert(out.end(), header_str.begin(), header_str.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

CsvmNetwork deserialize_network(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DataError("not a CSVM model file");
    }
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kFormatVersion) {
        throw DataError("unsupported model format version " + std::to_string(version));
    }
    const std::uint64_t header_len = get_u64(bytes.data() + 8);
    if (16 + header_len > bytes.size()) {
        throw DataError("model header length exceeds file size");
    }

    json header;
    try {
        header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + header_len);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model header: ") + e.what());
    }

    const std::uint8_t* payload = bytes.data() + 16 + header_len;
    const std::uint64_t payload_len = bytes.size() - 16 - header_len;

    try {
        CsvmNetwork net;
        net.input_channels = header.at("input").at("channels").get<int>();
        net.input_height = header.at("input").at("height").get<int>();
        net.input_width = header.at("input").at("width").get<int>();
        net.train_config = train_from_json(header.at("train"));
        net.class_names[0] = header.at("classes").at("positive").get<std::string>();
        net.class_names[1] = header.at("classes").at("negative").get<std::string>();

        std::vector<std::vector<float>> data;
        for (const auto& entry : header.at("arrays")) {
            const auto count = entry.at("count").get<std::uint64_t>();
            const auto offset = entry.at("offset").get<std::uint64_t>();
            if (offset + 4 * count > payload_len) {
                throw DataError("array '" + entry.at("name").get<std::string>() +
                                "' extends past end of model payload");
            }
            data.push_back(get_f32_array(payload + offset, count));
        }

        const auto& arch = header.at("arch");
        const auto& heads_meta = header.at("heads");
        if (data.size() != 2 * arch.size() || heads_meta.size() != arch.size()) {
            throw DataError("model array manifest does not match the architecture");
        }

        int in_channels = net.input_channels;
        for (std::size_t i = 0; i < arch.size(); ++i) {
            const BlockSpec spec = block_from_json(arch[i]);
            FilterBank bank(spec.n_filters, spec.kernel, in_channels, spec.stride);
            if (data[i].size() != bank.weights.size()) {
                throw DataError("bank" + std::to_string(i) + " has wrong element count");
            }
            bank.weights = std::move(data[i]);
            net.blocks.push_back({spec, std::move(bank)});
            in_channels = spec.n_filters;
        }

        const std::vector<std::size_t> expected = head_dims(net);
        for (std::size_t i = 0; i < arch.size(); ++i) {
            SvmModel head;
            head.weights = std::move(data[arch.size() + i]);
            if (head.weights.size() != expected[i]) {
                throw DataError("head" + std::to_string(i) + " dimension " +
                                std::to_string(head.weights.size()) + " does not match block output " +
                                std::to_string(expected[i]));
            }
            head.converged = heads_meta[i].at("converged").get<bool>();
            head.final_objective = heads_meta[i].at("final_objective").get<double>();
            head.iterations_run = heads_meta[i].at("iterations_run").get<int>();
            head.penalty_c = heads_meta[i].at("penalty_c").get<double>();
            net.heads.push_back(std::move(head));
        }
        return net;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model header: ") + e.what());
    }
}

void save_network(const CsvmNetwork& net, const std::string& path) {
    const std::vector<std::uint8_t> bytes = serialize_network(net);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to model file: " + path);
}

CsvmNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read model file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_network(bytes);
}

} // namespace csvm
