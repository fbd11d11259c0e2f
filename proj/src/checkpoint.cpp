#include "gcnl/checkpoint.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/image.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace gcnl {

using json = nlohmann::json;

namespace {

class Writer {
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }

    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void string(const std::string& s)
    {
        u64(s.size());
        bytes(s.data(), s.size());
    }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void skip(std::size_t n)
    {
        need(n, "padding");
        pos_ += n;
    }

    void need(std::size_t n, const char* what) const
    {
        if (remaining() < n) {
            throw LoadError(std::string("truncated checkpoint while reading ") + what, pos_);
        }
    }

    std::uint32_t u32(const char* what)
    {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t u64(const char* what)
    {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

    std::string string(const char* what)
    {
        const std::size_t at = pos_;
        const std::uint64_t n = u64(what);
        if (n > remaining()) {
            throw LoadError(std::string("length of ") + what + " exceeds file size", at);
        }
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

json metrics_to_json(const FinalMetrics& m)
{
    return json{{"epoch", m.epoch},
                {"train_loss", m.train_loss},
                {"macro_auc", m.macro_auc},
                {"macro_recall", m.macro_recall},
                {"accuracy", m.accuracy}};
}

FinalMetrics metrics_from_json(const json& j)
{
    return {j.at("epoch").get<std::size_t>(), j.at("train_loss").get<double>(), j.at("macro_auc").get<double>(),
            j.at("macro_recall").get<double>(), j.at("accuracy").get<double>()};
}

} // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Model& model, const CheckpointMeta& meta)
{
    json header;
    header["format"] = "gcnl-checkpoint";
    header["model_config"] = to_text(model.config());
    header["class_names"] = meta.class_names;
    header["seed"] = meta.seed;
    header["epochs_completed"] = meta.epochs_completed;
    header["final_metrics"] = meta.final_metrics ? metrics_to_json(*meta.final_metrics) : json(nullptr);
    header["tensor_count"] = model.parameters().size();

    Writer w;
    w.bytes(checkpoint_magic, 4);
    w.u32(checkpoint_version);
    w.string(header.dump(2));
    for (const auto& p : model.parameters()) {
        w.string(p.name);
        w.u32(static_cast<std::uint32_t>(p.value.rank()));
        for (const auto d : p.value.shape()) {
            w.u64(d);
        }
        for (const double v : p.value.data()) {
            w.f64(v);
        }
    }
    return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    r.need(4, "magic");
    if (std::memcmp(bytes.data(), checkpoint_magic, 4) != 0) {
        throw LoadError("bad magic: not a GCNL checkpoint", 0);
    }
    r.skip(4);
    const std::uint32_t version = r.u32("format version");
    if (version != checkpoint_version) {
        throw LoadError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                            std::to_string(checkpoint_version) + ")",
                        4);
    }

    const std::string header_text = r.string("header");
    const std::size_t header_at = r.offset() - header_text.size();
    json header;
    CheckpointMeta meta;
    ModelConfig config;
    std::size_t tensor_count = 0;
    try {
        header = json::parse(header_text);
        config = parse_model_config(header.at("model_config").get<std::string>());
        meta.class_names = header.at("class_names").get<std::vector<std::string>>();
        meta.seed = header.at("seed").get<std::uint64_t>();
        meta.epochs_completed = header.at("epochs_completed").get<std::size_t>();
        if (!header.at("final_metrics").is_null()) {
            meta.final_metrics = metrics_from_json(header.at("final_metrics"));
        }
        tensor_count = header.at("tensor_count").get<std::size_t>();
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed checkpoint header: ") + e.what(), header_at);
    } catch (const ConfigError& e) {
        throw LoadError(std::string("invalid model config in header: ") + e.what(), header_at);
    }

    Model model = [&] {
        try {
            return Model(config);
        } catch (const Error& e) {
            throw LoadError(std::string("model config in header does not build: ") + e.what(), header_at);
        }
    }();
    if (!meta.class_names.empty() && meta.class_names.size() != model.num_classes()) {
        throw LoadError("header lists " + std::to_string(meta.class_names.size()) + " class names for a " +
                            std::to_string(model.num_classes()) + "-class model",
                        header_at);
    }
    if (tensor_count != model.parameters().size()) {
        throw LoadError("header declares " + std::to_string(tensor_count) + " tensors, model has " +
                            std::to_string(model.parameters().size()),
                        header_at);
    }

    std::vector<Tensor> values;
    values.reserve(tensor_count);
    for (std::size_t i = 0; i < tensor_count; ++i) {
        const auto& expected = model.parameters()[i];
        const std::size_t at = r.offset();
        const std::string name = r.string("tensor name");
        if (name != expected.name) {
            throw LoadError("tensor " + std::to_string(i) + " is named '" + name + "', expected '" + expected.name + "'",
                            at);
        }
        const std::size_t rank_at = r.offset();
        const std::uint32_t rank = r.u32("tensor rank");
        if (rank != expected.value.rank()) {
            throw LoadError("tensor '" + name + "' has rank " + std::to_string(rank) + ", expected " +
                                std::to_string(expected.value.rank()),
                            rank_at);
        }
        Shape shape;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape.push_back(r.u64("tensor dims"));
        }
        if (shape != expected.value.shape()) {
            throw LoadError("tensor '" + name + "' has dims " + to_string(shape) + ", expected " +
                                to_string(expected.value.shape()),
                            rank_at);
        }
        const std::size_t n = element_count(shape);
        r.need(n * 8, "tensor payload");
        const std::size_t payload_at = r.offset();
        std::vector<double> data(n);
        for (auto& v : data) {
            v = r.f64("tensor payload");
        }
        try {
            values.emplace_back(std::move(shape), std::move(data));
        } catch (const NumericError& e) {
            throw LoadError("tensor '" + name + "': " + e.what(), payload_at);
        }
    }
    if (r.remaining() != 0) {
        throw LoadError("unexpected trailing bytes after last tensor", r.offset());
    }
    model.set_parameters(std::move(values));
    return {std::move(model), std::move(meta)};
}

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::filesystem::path& path)
{
    const auto bytes = serialize_checkpoint(model, meta);
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    return deserialize_checkpoint(read_file_bytes(path));
}

} // namespace gcnl
