// gcnl: command-line front end for the gesture CNN lab.
//
//   gcnl synth     --config run.cfg [--out DIR]
//   gcnl train     --config run.cfg [--seed N --epochs N --out DIR --model M --loss L --gamma G]
//   gcnl eval      --config run.cfg [--checkpoint FILE] [--split val|train|all]
//   gcnl predict   --checkpoint FILE --image FILE
//   gcnl gradcheck [--model M] [--loss L] [--gamma G] [--seed N]
//   gcnl compare   --config run.cfg [overrides]
//
// Failures print exactly one line to stderr,
//   error: kind=<tag> message="<json-escaped text>"
// and exit with status 1 (2 for usage errors).

#include "gcnl/checkpoint.hpp"
#include "gcnl/config.hpp"
#include "gcnl/errors.hpp"
#include "gcnl/experiments.hpp"
#include "gcnl/gradcheck.hpp"
#include "gcnl/image.hpp"
#include "gcnl/report.hpp"
#include "gcnl/zoo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::string> out;
    std::optional<std::string> model;
    std::optional<std::string> loss;
    std::optional<double> gamma;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool config_required)
{
    auto* opt = cmd->add_option("--config", o.config, "run configuration file");
    if (config_required) {
        opt->required();
    }
    cmd->add_option("--seed", o.seed, "training and model-init seed");
    cmd->add_option("--epochs", o.epochs, "number of epochs");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--model", o.model, "plain | residual | dense | custom");
    cmd->add_option("--loss", o.loss, "focal | cross_entropy");
    cmd->add_option("--gamma", o.gamma, "focal exponent");
}

gcnl::RunConfig load_with_overrides(const Overrides& o)
{
    gcnl::RunConfig cfg = gcnl::load_run_config(o.config);
    if (o.seed) {
        cfg.train.seed = *o.seed;
        cfg.model_seed = *o.seed;
    }
    if (o.epochs) {
        cfg.train.epochs = *o.epochs;
    }
    if (o.out) {
        cfg.output_dir = *o.out;
    }
    if (o.model) {
        cfg.model = *o.model;
    }
    if (o.loss) {
        cfg.train.loss.mode = gcnl::parse_loss_mode(*o.loss);
    }
    if (o.gamma) {
        cfg.train.loss.gamma = *o.gamma;
    }
    cfg.validate();
    return cfg;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw gcnl::IoError("cannot write " + path.string());
    }
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw gcnl::IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

gcnl::Split split_for(const gcnl::RunConfig& cfg, const gcnl::Dataset& ds)
{
    return gcnl::split(ds, cfg.train_fraction, cfg.split_seed);
}

int cmd_synth(const Overrides& o)
{
    const auto cfg = load_with_overrides(o);
    if (cfg.dataset != gcnl::DatasetSource::synthetic) {
        throw gcnl::ConfigError("synth needs dataset = synthetic");
    }
    const auto ds = gcnl::load_dataset(cfg);
    gcnl::export_directory(ds, cfg.output_dir);
    std::cout << "wrote " << ds.size() << " images in " << ds.num_classes() << " classes to "
              << cfg.output_dir.string() << '\n';
    return 0;
}

int cmd_train(const Overrides& o)
{
    const auto cfg = load_with_overrides(o);
    const auto ds = gcnl::load_dataset(cfg);
    const auto parts = split_for(cfg, ds);
    gcnl::Model model(gcnl::resolve_model_config(cfg, ds.num_classes()));
    ensure_dir(cfg.output_dir);

    auto result = gcnl::train(std::move(model), parts.train, parts.val, cfg.train, [](const gcnl::EpochRecord& e) {
        std::cout << "epoch " << e.epoch << " train_loss " << gcnl::fmt_metric(e.train_loss);
        if (e.val) {
            std::cout << " val_auc " << gcnl::fmt_metric(e.val->macro_auc) << " val_recall "
                      << gcnl::fmt_metric(e.val->macro_recall) << " val_accuracy "
                      << gcnl::fmt_metric(e.val->accuracy);
        }
        std::cout << '\n' << std::flush;
    });

    const auto final_report = gcnl::evaluate(result.model, parts.val, cfg.train.epochs);
    gcnl::CheckpointMeta meta;
    meta.class_names = ds.class_names;
    meta.seed = cfg.train.seed;
    meta.epochs_completed = cfg.train.epochs;
    meta.final_metrics = gcnl::FinalMetrics{cfg.train.epochs, result.history.epochs.back().train_loss,
                                            final_report.macro_auc, final_report.macro_recall,
                                            final_report.accuracy};
    gcnl::save_checkpoint(result.model, meta, cfg.output_dir / "model.gcnl");
    write_text(cfg.output_dir / "metrics.csv", gcnl::history_csv(result.history, cfg.record_timing));
    std::cout << "saved " << (cfg.output_dir / "model.gcnl").string() << '\n';
    return 0;
}

int cmd_eval(const Overrides& o, const std::optional<std::string>& checkpoint, const std::string& which)
{
    const auto cfg = load_with_overrides(o);
    const fs::path ckpt_path = checkpoint ? fs::path(*checkpoint) : cfg.output_dir / "model.gcnl";
    const auto ckpt = gcnl::load_checkpoint(ckpt_path);
    const auto ds = gcnl::load_dataset(cfg);
    if (ds.class_names != ckpt.meta.class_names) {
        throw gcnl::ConfigError("dataset classes do not match the checkpoint (" +
                                std::to_string(ds.num_classes()) + " vs " +
                                std::to_string(ckpt.meta.class_names.size()) + " classes, or different names)");
    }
    const auto& shape = ds.samples.front().image.shape();
    const auto& in = ckpt.model.input_shape();
    if (shape[1] != in.height || shape[2] != in.width) {
        throw gcnl::ConfigError("image_size does not match the checkpoint input " + std::to_string(in.height) + "x" +
                                std::to_string(in.width));
    }
    gcnl::Dataset target;
    if (which == "all") {
        target = ds;
    } else {
        const auto parts = split_for(cfg, ds);
        target = which == "train" ? parts.train : parts.val;
    }
    const auto report = gcnl::evaluate(ckpt.model, target, ckpt.meta.epochs_completed);
    std::cout << "split " << which << '\n' << gcnl::format_metrics(report, ckpt.meta.class_names);
    return 0;
}

int cmd_predict(const std::string& checkpoint, const std::string& image)
{
    const auto ckpt = gcnl::load_checkpoint(checkpoint);
    const auto& in = ckpt.model.input_shape();
    if (in.height != in.width) {
        throw gcnl::ConfigError("predict needs a square model input");
    }
    const auto x = gcnl::preprocess(gcnl::read_file_bytes(image), in.height);
    const auto probs = ckpt.model.predict(gcnl::reshape(x, {1, in.channels, in.height, in.width}));
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c) {
        if (probs[c] > probs[best]) {
            best = c;
        }
    }
    std::cout << "class " << ckpt.meta.class_names[best] << '\n';
    for (std::size_t c = 0; c < probs.size(); ++c) {
        std::cout << ckpt.meta.class_names[c] << ' ' << gcnl::fmt_metric(probs[c]) << '\n';
    }
    return 0;
}

int cmd_gradcheck(const Overrides& o)
{
    std::string model = "plain";
    gcnl::LossMode mode = gcnl::LossMode::focal;
    double gamma = 2.0;
    std::uint64_t seed = 7;
    if (!o.config.empty()) {
        const auto cfg = load_with_overrides(o);
        model = cfg.model;
        mode = cfg.train.loss.mode;
        gamma = cfg.train.loss.gamma;
        seed = cfg.model_seed;
    }
    if (o.model) {
        model = *o.model;
    }
    if (o.loss) {
        mode = gcnl::parse_loss_mode(*o.loss);
    }
    if (o.gamma) {
        gamma = *o.gamma;
    }
    if (o.seed) {
        seed = *o.seed;
    }
    const gcnl::TinyScale scale;
    const auto loss = mode == gcnl::LossMode::cross_entropy ? gcnl::FocalConfig::cross_entropy(scale.classes)
                                                            : gcnl::FocalConfig::uniform(gamma, scale.classes);
    const auto report = gcnl::grad_check_zoo(model, loss, seed, scale);
    std::cout << "model " << model << '\n'
              << "loss " << (mode == gcnl::LossMode::cross_entropy ? "cross_entropy" : "focal") << '\n'
              << "gamma " << loss.gamma << '\n'
              << "checked " << report.checked << '\n'
              << "skipped_at_kinks " << report.skipped_at_kinks << '\n';
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", report.max_rel_err);
    std::cout << "max_rel_err " << err << '\n'
              << "worst " << report.worst_parameter << '\n'
              << "result " << (report.pass ? "pass" : "fail") << '\n';
    if (!report.pass) {
        const bool too_many_kinks = report.max_rel_err <= report.tolerance;
        throw gcnl::Error("gradcheck", too_many_kinks ? "too many elements sit at ReLU/max-pool switch points"
                                                      : "max relative error " + std::string(err) +
                                                            " exceeds tolerance");
    }
    return 0;
}

int cmd_compare(const Overrides& o)
{
    const auto cfg = load_with_overrides(o);
    const auto ds = gcnl::load_dataset(cfg);
    const auto parts = split_for(cfg, ds);
    std::optional<gcnl::ModelConfig> custom;
    if (!cfg.compare_custom.empty()) {
        gcnl::RunConfig c = cfg;
        c.model = "custom";
        c.model_config = cfg.compare_custom;
        custom = gcnl::resolve_model_config(c, ds.num_classes());
    }
    const auto result = gcnl::run_compare(parts.train, parts.val, cfg.train, cfg.model_seed, cfg.model_width, custom);
    ensure_dir(cfg.output_dir);
    const std::string table = gcnl::format_compare_table(result);
    write_text(cfg.output_dir / "compare.txt", table);
    write_text(cfg.output_dir / "compare.csv", gcnl::compare_csv(result));
    std::cout << table;
    return 0;
}

void print_error(const std::string& kind, const std::string& message)
{
    std::cerr << "error: kind=" << kind << " message=" << nlohmann::json(message).dump() << std::endl;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gcnl: small CNN lab for gesture recognition"};
    app.require_subcommand(1);

    Overrides o;
    std::optional<std::string> checkpoint;
    std::string image;
    std::string which = "val";

    auto* synth = app.add_subcommand("synth", "write a synthetic dataset directory");
    add_overrides(synth, o, true);
    auto* train = app.add_subcommand("train", "train a model, write model.gcnl and metrics.csv");
    add_overrides(train, o, true);
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the configured dataset");
    add_overrides(eval, o, true);
    eval->add_option("--checkpoint", checkpoint, "checkpoint file (default <out>/model.gcnl)");
    eval->add_option("--split", which, "val | train | all")->check(CLI::IsMember({"val", "train", "all"}));
    auto* predict = app.add_subcommand("predict", "classify one image");
    predict->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    predict->add_option("--image", image, "PGM/PPM image")->required();
    predict->add_option("--config", o.config, "accepted for uniformity; unused");
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of a zoo model at tiny scale");
    add_overrides(gradcheck, o, false);
    auto* compare = app.add_subcommand("compare", "train every zoo model and report AUC / Recall");
    add_overrides(compare, o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*synth) {
            return cmd_synth(o);
        }
        if (*train) {
            return cmd_train(o);
        }
        if (*eval) {
            return cmd_eval(o, checkpoint, which);
        }
        if (*predict) {
            return cmd_predict(*checkpoint, image);
        }
        if (*gradcheck) {
            return cmd_gradcheck(o);
        }
        if (*compare) {
            return cmd_compare(o);
        }
    } catch (const gcnl::Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 2;
}
