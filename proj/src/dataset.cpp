#include "gcnl/dataset.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/image.hpp"
#include "gcnl/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gcnl {

namespace fs = std::filesystem;

std::vector<std::size_t> Dataset::class_counts() const
{
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (const auto& s : samples) {
        if (s.label < counts.size()) {
            ++counts[s.label];
        }
    }
    return counts;
}

std::vector<std::size_t> Dataset::labels() const
{
    std::vector<std::size_t> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.label);
    }
    return out;
}

void Dataset::validate() const
{
    if (class_names.size() < 2) {
        throw ConfigError("dataset needs at least 2 classes, has " + std::to_string(class_names.size()));
    }
    std::size_t image_size = 0;
    for (const auto& s : samples) {
        if (s.label >= class_names.size()) {
            throw ConfigError("sample " + s.source_id + " has invalid label " + std::to_string(s.label));
        }
        const auto& shape = s.image.shape();
        if (shape.size() != 3 || shape[0] != 1 || shape[1] != shape[2]) {
            throw ConfigError("sample " + s.source_id + " image must be [1,S,S], got " + to_string(shape));
        }
        if (image_size == 0) {
            image_size = shape[1];
        } else if (shape[1] != image_size) {
            throw ConfigError("sample " + s.source_id + " has a different image size");
        }
        for (const double v : s.image.data()) {
            if (v < 0.0 || v > 1.0) {
                throw ConfigError("sample " + s.source_id + " has pixel values outside [0,1]");
            }
        }
    }
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            throw ConfigError("class '" + class_names[c] + "' has no samples");
        }
    }
}

Dataset load_directory(const fs::path& root, std::size_t size)
{
    if (!fs::is_directory(root)) {
        throw IoError("dataset directory " + root.string() + " does not exist");
    }
    std::vector<std::string> classes;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            classes.push_back(entry.path().filename().string());
        }
    }
    std::sort(classes.begin(), classes.end());

    Dataset ds;
    ds.class_names = classes;
    ds.provenance = {Provenance::Kind::directory, 0, root.string()};
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(root / classes[c])) {
            const auto ext = entry.path().extension().string();
            if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
                files.push_back(entry.path().filename().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const auto path = root / classes[c] / f;
            const auto img = read_image(path);
            ds.samples.push_back({normalize(resize_bilinear(to_grayscale(img), size)), c, classes[c] + "/" + f});
        }
    }
    ds.validate();
    return ds;
}

void export_directory(const Dataset& dataset, const fs::path& root)
{
    dataset.validate();
    fs::create_directories(root);
    std::vector<std::size_t> next(dataset.num_classes(), 0);
    for (const auto& c : dataset.class_names) {
        fs::create_directories(root / c);
    }
    for (const auto& s : dataset.samples) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06zu.pgm", next[s.label]++);
        write_image(root / dataset.class_names[s.label] / name, denormalize(s.image));
    }
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& dataset)
{
    std::vector<std::vector<std::size_t>> out(dataset.num_classes());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        out[dataset.samples[i].label].push_back(i);
    }
    return out;
}

Dataset subset(const Dataset& dataset, std::vector<std::size_t> indices)
{
    std::sort(indices.begin(), indices.end());
    Dataset out{dataset.class_names, {}, dataset.provenance};
    out.samples.reserve(indices.size());
    for (const auto i : indices) {
        out.samples.push_back(dataset.samples[i]);
    }
    return out;
}

} // namespace

Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must be in (0, 1)");
    }
    const auto groups = indices_by_class(dataset);
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const auto& members = groups[c];
        const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        if (n_train == 0 || n_train >= members.size()) {
            throw ConfigError("train fraction " + std::to_string(train_fraction) + " leaves class '" +
                              dataset.class_names[c] + "' (" + std::to_string(members.size()) +
                              " samples) with an empty side");
        }
        Rng rng(derive_seed(seed, c));
        const auto order = rng.permutation(members.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            (k < n_train ? train : val).push_back(members[order[k]]);
        }
    }
    return {subset(dataset, std::move(train)), subset(dataset, std::move(val))};
}

Tensor stack_images(const Dataset& dataset, const std::vector<std::size_t>& indices)
{
    if (indices.empty()) {
        throw ShapeError("cannot stack an empty batch");
    }
    const Shape& first = dataset.samples[indices.front()].image.shape();
    std::vector<double> data;
    data.reserve(indices.size() * element_count(first));
    for (const auto i : indices) {
        const auto& img = dataset.samples[i].image;
        if (img.shape() != first) {
            throw ShapeError("batch images differ in shape");
        }
        data.insert(data.end(), img.data().begin(), img.data().end());
    }
    Shape shape{indices.size()};
    shape.insert(shape.end(), first.begin(), first.end());
    return Tensor(std::move(shape), std::move(data));
}

namespace {

std::vector<Batch> make_batches(const Dataset& dataset, std::size_t batch_size,
                                const std::vector<std::size_t>& order)
{
    if (batch_size == 0) {
        throw ConfigError("batch size must be >= 1");
    }
    std::vector<Batch> out;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<std::size_t> labels;
        labels.reserve(idx.size());
        for (const auto i : idx) {
            labels.push_back(dataset.samples[i].label);
        }
        out.push_back({stack_images(dataset, idx), std::move(labels)});
    }
    return out;
}

} // namespace

std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t shuffle_seed)
{
    Rng rng(shuffle_seed);
    return make_batches(dataset, batch_size, rng.permutation(dataset.samples.size()));
}

std::vector<Batch> sequential_batches(const Dataset& dataset, std::size_t batch_size)
{
    std::vector<std::size_t> order(dataset.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    return make_batches(dataset, batch_size, order);
}

Dataset imbalance(const Dataset& dataset, const std::vector<double>& keep_fractions, std::uint64_t seed)
{
    if (keep_fractions.size() != dataset.num_classes()) {
        throw ConfigError("need one keep fraction per class (" + std::to_string(dataset.num_classes()) + ")");
    }
    const auto groups = indices_by_class(dataset);
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const double f = keep_fractions[c];
        if (!(f > 0.0 && f <= 1.0)) {
            throw ConfigError("keep fraction for class '" + dataset.class_names[c] + "' must be in (0, 1]");
        }
        const auto n = static_cast<std::size_t>(std::llround(f * static_cast<double>(groups[c].size())));
        if (n == 0) {
            throw ConfigError("keep fraction " + std::to_string(f) + " empties class '" + dataset.class_names[c] +
                              "'");
        }
        Rng rng(derive_seed(seed, c));
        const auto order = rng.permutation(groups[c].size());
        for (std::size_t k = 0; k < n; ++k) {
            kept.push_back(groups[c][order[k]]);
        }
    }
    return subset(dataset, std::move(kept));
}

} // namespace gcnl
