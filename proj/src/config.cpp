#include "gcnl/config.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/image.hpp"
#include "gcnl/zoo.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gcnl {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
    }
    return out;
}

double to_real(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

fs::path resolve(const fs::path& base, const std::string& v)
{
    const fs::path p(v);
    return (p.is_absolute() || base.empty()) ? p : base / p;
}

} // namespace

LossMode parse_loss_mode(std::string_view text)
{
    if (text == "focal") {
        return LossMode::focal;
    }
    if (text == "cross_entropy") {
        return LossMode::cross_entropy;
    }
    throw ConfigError("loss must be focal or cross_entropy, got '" + std::string(text) + "'");
}

void RunConfig::validate() const
{
    if (dataset == DatasetSource::directory && !fs::is_directory(data_dir)) {
        throw ConfigError("data_dir '" + data_dir.string() + "' is not a directory");
    }
    if (synth_classes.size() < 2) {
        throw ConfigError("synth_classes needs at least 2 classes");
    }
    if (synth_per_class < 1) {
        throw ConfigError("synth_per_class must be >= 1");
    }
    if (image_size < 1) {
        throw ConfigError("image_size must be >= 1");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0, 1)");
    }
    if (model != "plain" && model != "residual" && model != "dense" && model != "custom") {
        throw ConfigError("model must be plain, residual, dense or custom, got '" + model + "'");
    }
    if (model == "custom" && !fs::is_regular_file(model_config)) {
        throw ConfigError("model_config '" + model_config.string() + "' is not a readable file");
    }
    if (!compare_custom.empty() && !fs::is_regular_file(compare_custom)) {
        throw ConfigError("compare_custom '" + compare_custom.string() + "' is not a readable file");
    }
    for (const double f : imbalance) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw ConfigError("imbalance fractions must be in (0, 1]");
        }
    }
    train.validate();
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir)
{
    RunConfig cfg;
    bool have_dataset = false;
    std::set<std::string> seen;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"dataset",
         [&](const auto& k, const auto& v) {
             if (v == "synthetic") {
                 cfg.dataset = DatasetSource::synthetic;
             } else if (v == "directory") {
                 cfg.dataset = DatasetSource::directory;
             } else {
                 throw ConfigError("config key '" + k + "': expected synthetic or directory, got '" + v + "'");
             }
             have_dataset = true;
         }},
        {"data_dir", [&](const auto&, const auto& v) { cfg.data_dir = resolve(base_dir, v); }},
        {"synth_seed", [&](const auto& k, const auto& v) { cfg.synth_seed = to_unsigned(k, v); }},
        {"synth_classes",
         [&](const auto&, const auto& v) {
             cfg.synth_classes.clear();
             for (const auto& item : split_list(v)) {
                 cfg.synth_classes.push_back(parse_gesture_class(item));
             }
         }},
        {"synth_per_class", [&](const auto& k, const auto& v) { cfg.synth_per_class = to_unsigned(k, v); }},
        {"synth_clutter", [&](const auto&, const auto& v) { cfg.synth_clutter = parse_clutter_level(v); }},
        {"synth_jitter", [&](const auto& k, const auto& v) { cfg.synth_jitter = to_bool(k, v); }},
        {"imbalance",
         [&](const auto& k, const auto& v) {
             cfg.imbalance.clear();
             for (const auto& item : split_list(v)) {
                 cfg.imbalance.push_back(to_real(k, item));
             }
         }},
        {"imbalance_seed", [&](const auto& k, const auto& v) { cfg.imbalance_seed = to_unsigned(k, v); }},
        {"image_size", [&](const auto& k, const auto& v) { cfg.image_size = to_unsigned(k, v); }},
        {"train_fraction", [&](const auto& k, const auto& v) { cfg.train_fraction = to_real(k, v); }},
        {"split_seed", [&](const auto& k, const auto& v) { cfg.split_seed = to_unsigned(k, v); }},
        {"model", [&](const auto&, const auto& v) { cfg.model = v; }},
        {"model_config", [&](const auto&, const auto& v) { cfg.model_config = resolve(base_dir, v); }},
        {"model_width", [&](const auto& k, const auto& v) { cfg.model_width = to_unsigned(k, v); }},
        {"model_seed", [&](const auto& k, const auto& v) { cfg.model_seed = to_unsigned(k, v); }},
        {"epochs", [&](const auto& k, const auto& v) { cfg.train.epochs = to_unsigned(k, v); }},
        {"batch_size", [&](const auto& k, const auto& v) { cfg.train.batch_size = to_unsigned(k, v); }},
        {"learning_rate", [&](const auto& k, const auto& v) { cfg.train.learning_rate = to_real(k, v); }},
        {"momentum", [&](const auto& k, const auto& v) { cfg.train.momentum = to_real(k, v); }},
        {"seed", [&](const auto& k, const auto& v) { cfg.train.seed = to_unsigned(k, v); }},
        {"eval_every", [&](const auto& k, const auto& v) { cfg.train.eval_every = to_unsigned(k, v); }},
        {"loss", [&](const auto&, const auto& v) { cfg.train.loss.mode = parse_loss_mode(v); }},
        {"gamma", [&](const auto& k, const auto& v) { cfg.train.loss.gamma = to_real(k, v); }},
        {"alpha",
         [&](const auto& k, const auto& v) {
             if (v == "frequency") {
                 cfg.train.loss.alpha = AlphaPolicy::frequency;
             } else if (v == "uniform") {
                 cfg.train.loss.alpha = AlphaPolicy::uniform;
             } else {
                 throw ConfigError("config key '" + k + "': expected frequency or uniform, got '" + v + "'");
             }
         }},
        {"record_timing", [&](const auto& k, const auto& v) { cfg.record_timing = to_bool(k, v); }},
        {"output_dir", [&](const auto&, const auto& v) { cfg.output_dir = resolve(base_dir, v); }},
        {"compare_custom", [&](const auto&, const auto& v) { cfg.compare_custom = resolve(base_dir, v); }},
    };

    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key + "' has no value");
        }
        it->second(key, value);
    }
    if (!have_dataset) {
        throw ConfigError("missing required config key 'dataset'");
    }
    if (cfg.dataset == DatasetSource::directory && cfg.data_dir.empty()) {
        throw ConfigError("missing required config key 'data_dir' for dataset = directory");
    }
    if (cfg.model == "custom" && cfg.model_config.empty()) {
        throw ConfigError("missing required config key 'model_config' for model = custom");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const fs::path& path)
{
    if (!fs::is_regular_file(path)) {
        throw ConfigError("config file '" + path.string() + "' not found");
    }
    const auto bytes = read_file_bytes(path);
    return parse_run_config(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

Dataset load_dataset(const RunConfig& cfg)
{
    Dataset ds;
    if (cfg.dataset == DatasetSource::directory) {
        ds = load_directory(cfg.data_dir, cfg.image_size);
    } else {
        SynthParams p;
        p.seed = cfg.synth_seed;
        p.classes = cfg.synth_classes;
        p.n_per_class = cfg.synth_per_class;
        p.size = cfg.image_size;
        p.clutter = cfg.synth_clutter;
        p.jitter = cfg.synth_jitter;
        ds = synth_gestures(p);
    }
    if (!cfg.imbalance.empty()) {
        ds = imbalance(ds, cfg.imbalance, cfg.imbalance_seed);
    }
    return ds;
}

ModelConfig resolve_model_config(const RunConfig& cfg, std::size_t classes)
{
    const InputShape input{1, cfg.image_size, cfg.image_size};
    if (cfg.model != "custom") {
        return zoo_config(cfg.model, input, classes, cfg.model_seed, cfg.model_width);
    }
    const auto bytes = read_file_bytes(cfg.model_config);
    ModelConfig mc = parse_model_config(std::string(bytes.begin(), bytes.end()));
    if (mc.classes != classes) {
        throw ConfigError("custom model predicts " + std::to_string(mc.classes) + " classes, dataset has " +
                          std::to_string(classes));
    }
    if (!(mc.input == input)) {
        throw ConfigError("custom model input does not match image_size " + std::to_string(cfg.image_size));
    }
    return mc;
}

} // namespace gcnl
