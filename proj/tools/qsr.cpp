// qsr: command line front end for the sampling, reconstruction, training and
// evaluation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <qsr/cnn/model_io.hpp>
#include <qsr/cnn/train.hpp>
#include <qsr/error.hpp>
#include <qsr/image_io.hpp>
#include <qsr/mask.hpp>
#include <qsr/metrics.hpp>
#include <qsr/pipeline/chain.hpp>
#include <qsr/pipeline/config.hpp>
#include <qsr/pipeline/dataset.hpp>
#include <qsr/pipeline/report.hpp>
#include <qsr/sensor.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace fs = std::filesystem;
using namespace qsr;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

/// Bad flags, flag combinations or configuration values.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kKnownKeys = {
    "mask.seed",        "mask.period",       "fsr.block",          "fsr.border",
    "fsr.iterations",   "fsr.rho",           "fsr.gamma",          "fsr.mode",
    "fsr.threads",      "eval.border-crop",  "train.epochs",       "train.batch-size",
    "train.lr",         "train.lr-decay",    "train.lr-step-epochs", "train.clip",
    "train.patch",      "train.stride",      "train.depth",        "train.width",
    "train.seed",       "train.threads",     "train.augment",      "train.qs-lr-factor",
};

/// Flags shared by the subcommands that build a processing chain.
struct ChainFlags {
    std::string sensor = "quarter";
    std::string recon = "fsr";
    std::string refine = "none";
    std::string mask_file;
    std::uint64_t mask_seed = 0;
    int mask_period = kDefaultMaskPeriod;
    std::string shift = "0,0";
    std::string model;
    std::string config;
    std::vector<std::string> overrides;
    bool no_cell_check = false;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* period_opt = nullptr;
};

void add_mask_options(CLI::App& app, ChainFlags& f) {
    app.add_option("--mask-file", f.mask_file, "Sampling mask file (QSMASK text format)");
    f.seed_opt = app.add_option("--mask-seed", f.mask_seed, "Seed of the random quarter-sampling mask");
    f.period_opt = app.add_option("--mask-period", f.mask_period, "Period of the generated mask");
    app.add_option("--shift", f.shift, "Cyclic mask shift as dx,dy");
    app.add_flag("--no-cell-check", f.no_cell_check,
                 "Accept mask files without exactly one sample per 2x2 cell");
}

void add_config_options(CLI::App& app, ChainFlags& f) {
    app.add_option("--config", f.config, "key = value configuration file");
    app.add_option("--set", f.overrides, "Override one configuration key as key=value; repeatable")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

void add_chain_options(CLI::App& app, ChainFlags& f) {
    app.add_option("--sensor", f.sensor, "Sensor model")->check(CLI::IsMember({"lowres", "quarter"}));
    app.add_option("--recon", f.recon, "First-stage reconstruction")->check(CLI::IsMember({"bicubic", "fsr"}));
    app.add_option("--refine", f.refine, "CNN refinement")->check(CLI::IsMember({"none", "vdsr", "vdsr-qs"}));
    app.add_option("--model", f.model, "Trained model file");
    add_config_options(app, f);
    add_mask_options(app, f);
}

// Configuration file values, then --set overrides on top.
pipeline::KeyValueConfig load_config(const ChainFlags& f) {
    auto config = f.config.empty() ? pipeline::KeyValueConfig{} : pipeline::KeyValueConfig::load(f.config);
    for (const auto& item : f.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--set expects key=value, got '" + item + "'");
        }
        config.set(item.substr(0, eq), item.substr(eq + 1));
    }
    const auto unknown = config.unknown_keys(kKnownKeys);
    if (!unknown.empty()) {
        std::string list;
        for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
        throw UsageError("unknown configuration key(s): " + list);
    }
    return config;
}

std::pair<int, int> parse_shift(const std::string& text) {
    int dx = 0;
    int dy = 0;
    char comma = 0;
    std::istringstream in(text);
    if (!(in >> dx >> comma >> dy) || comma != ',' || !(in >> std::ws).eof()) {
        throw UsageError("--shift expects dx,dy, got '" + text + "'");
    }
    return {dx, dy};
}

SamplingMask resolve_mask(const ChainFlags& f, const pipeline::KeyValueConfig& config) {
    if (!f.mask_file.empty()) {
        return load_mask(f.mask_file, !f.no_cell_check);
    }
    const auto seed = f.seed_opt->count() > 0
                          ? f.mask_seed
                          : static_cast<std::uint64_t>(config.get_int("mask.seed", 0));
    const int period = f.period_opt->count() > 0 ? f.mask_period : config.get_int("mask.period", f.mask_period);
    return generate_random_qs_mask(period, seed);
}

FsrParams fsr_params(const pipeline::KeyValueConfig& config) {
    FsrParams p;
    p.block_size = config.get_int("fsr.block", p.block_size);
    p.border = config.get_int("fsr.border", p.border);
    p.iterations = config.get_int("fsr.iterations", p.iterations);
    p.rho = config.get_double("fsr.rho", p.rho);
    p.gamma = config.get_double("fsr.gamma", p.gamma);
    p.threads = config.get_int("fsr.threads", p.threads);
    const std::string mode = config.get_string("fsr.mode", "independent");
    if (mode == "independent") {
        p.mode = FsrMode::IndependentBlocks;
    } else if (mode == "sequential") {
        p.mode = FsrMode::SequentialReuse;
    } else {
        throw UsageError("fsr.mode must be 'independent' or 'sequential', got '" + mode + "'");
    }
    validate(p);
    return p;
}

pipeline::ChainConfig chain_from(const ChainFlags& f, const pipeline::KeyValueConfig& config) {
    pipeline::ChainConfig c;
    c.sensor = pipeline::parse_sensor(f.sensor);
    c.reconstructor = pipeline::parse_reconstructor(f.recon);
    c.refiner = pipeline::parse_refiner(f.refine);
    c.base_mask = resolve_mask(f, config);
    c.shift = parse_shift(f.shift);
    c.fsr = fsr_params(config);
    c.model_path = f.model;
    pipeline::validate(c);
    if (c.refiner != pipeline::Refiner::None && f.model.empty()) {
        throw UsageError("--refine " + f.refine + " needs --model");
    }
    return c;
}

// Runs `setup` and reports any library validation failure as a usage error.
template <typename F>
auto as_usage(F&& setup) {
    try {
        return setup();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (!fs::is_directory(p)) {
        throw IoError("cannot create output directory " + p.string());
    }
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

pipeline::Dataset load_dataset(const std::string& dir) {
    auto data = pipeline::ingest_dataset(dir);
    if (!data.skipped.empty()) {
        std::cerr << "warning: skipped " << data.skipped.size() << " unreadable file(s):";
        for (const auto& name : data.skipped) std::cerr << ' ' << name;
        std::cerr << '\n';
    }
    return data;
}

// ---- mask -------------------------------------------------------------------

void cmd_mask_gen(const ChainFlags& f, const std::string& out_dir) {
    const auto [mask, shift] = as_usage([&] {
        return std::pair{resolve_mask(f, load_config(f)), parse_shift(f.shift)};
    });
    const SamplingMask shifted = shift_mask(mask, shift.first, shift.second);
    const fs::path path = ensure_dir(out_dir) / "mask.txt";
    save_mask(shifted, path);
    std::cout << "wrote " << path.string() << " (" << shifted.width() << "x" << shifted.height() << ", "
              << shifted.count() << " samples)\n";
}

void cmd_mask_show(const ChainFlags& f) {
    const SamplingMask mask = as_usage([&] { return resolve_mask(f, load_config(f)); });
    for (int y = 0; y < mask.height(); ++y) {
        std::string line;
        for (int x = 0; x < mask.width(); ++x) line += mask(x, y) ? '#' : '.';
        std::cout << line << '\n';
    }
    const double density = static_cast<double>(mask.count()) / (static_cast<double>(mask.width()) * mask.height());
    std::cout << mask.width() << "x" << mask.height() << ", period " << mask.period() << ", "
              << mask.count() << " samples, density " << density << ", one sample per 2x2 cell: "
              << (one_sample_per_cell(mask) ? "yes" : "no") << '\n';
}

// ---- sample / reconstruct -----------------------------------------------------

void cmd_sample(const ChainFlags& f, const std::string& input, const std::string& out_dir) {
    const auto config = as_usage([&] {
        ChainFlags g = f;
        g.recon = f.sensor == "lowres" ? "bicubic" : "fsr";
        g.refine = "none";
        return chain_from(g, load_config(f));
    });
    const Image reference = load_image(input);
    const fs::path dir = ensure_dir(out_dir);
    const std::string stem = fs::path(input).stem().string();
    if (config.sensor == pipeline::Sensor::LowRes) {
        const fs::path path = dir / (stem + "_lowres.pgm");
        save_image(simulate_lowres(reference), path);
        std::cout << "wrote " << path.string() << '\n';
        return;
    }
    const SamplingMask mask = pipeline::chain_mask(config, reference.width(), reference.height());
    const SampledImage sampled = simulate_quarter(reference, mask);
    const fs::path image_path = dir / (stem + "_quarter.pgm");
    const fs::path mask_path = dir / (stem + "_mask.txt");
    save_image(sampled.values, image_path);
    save_mask(mask, mask_path);
    std::cout << "wrote " << image_path.string() << " and " << mask_path.string() << '\n';
}

void cmd_reconstruct(const ChainFlags& f, const std::string& input, const std::string& out_dir) {
    const auto config = as_usage([&] { return chain_from(f, load_config(f)); });
    const Image reference = load_image(input);
    const pipeline::ChainOutput out = pipeline::run_chain(reference, config);
    const fs::path dir = ensure_dir(out_dir);
    const std::string stem = fs::path(input).stem().string();
    std::string chain = config.name();
    std::replace(chain.begin(), chain.end(), '+', '_');
    const fs::path path = dir / (stem + "_" + chain + ".pgm");
    save_image(out.output, path);
    if (config.refiner != pipeline::Refiner::None) {
        pipeline::ChainConfig first = config;
        first.refiner = pipeline::Refiner::None;
        std::string first_name = first.name();
        std::replace(first_name.begin(), first_name.end(), '+', '_');
        save_image(out.intermediate, dir / (stem + "_" + first_name + ".pgm"));
    }
    const Image q = quantized(out.output);
    std::printf("%s: PSNR %.4f dB, SSIM %.6f -> %s\n", config.name().c_str(), psnr(q, reference),
                reference.width() >= 11 && reference.height() >= 11 ? ssim(q, reference) : 0.0,
                path.string().c_str());
}

// ---- train --------------------------------------------------------------------

cnn::TrainConfig train_config(bool toy, const pipeline::KeyValueConfig& config, int shift_count,
                              cnn::Variant variant) {
    cnn::TrainConfig c = toy ? cnn::TrainConfig::toy() : cnn::TrainConfig{};
    c.epochs = config.get_int("train.epochs", c.epochs);
    c.batch_size = config.get_int("train.batch-size", c.batch_size);
    c.base_lr = config.get_double("train.lr", c.base_lr);
    c.lr_decay = config.get_double("train.lr-decay", c.lr_decay);
    c.lr_step_epochs = config.get_int("train.lr-step-epochs", c.lr_step_epochs);
    c.clip_value = config.get_double("train.clip", c.clip_value);
    c.patch = config.get_int("train.patch", c.patch);
    c.stride = config.get_int("train.stride", c.stride);
    c.depth = config.get_int("train.depth", c.depth);
    c.width = config.get_int("train.width", c.width);
    c.seed = static_cast<std::uint64_t>(config.get_int("train.seed", static_cast<int>(c.seed)));
    c.threads = config.get_int("train.threads", c.threads);
    c.augment_dihedral = config.get_bool("train.augment", c.augment_dihedral);
    c.qs_lr_factor = config.get_double("train.qs-lr-factor", c.qs_lr_factor);
    c.shift_count = shift_count;
    c.variant = variant;
    cnn::validate(c);
    return c;
}

void cmd_train(const ChainFlags& f, const std::string& data_dir, int shift_count, bool toy, const std::string& out_dir) {
    if (f.refine == "none") {
        throw UsageError("train needs --refine vdsr or --refine vdsr-qs");
    }
    if (f.model.empty()) {
        throw UsageError("train needs --model <output file>");
    }
    const std::string model_out = f.model;
    const auto [chain, config] = as_usage([&] {
        const auto file = load_config(f);
        // The training set comes from the first stage; the refiner only picks the variant.
        ChainFlags first = f;
        first.refine = "none";
        first.model.clear();
        auto c = chain_from(first, file);
        pipeline::ChainConfig with_refiner = c;
        with_refiner.refiner = pipeline::parse_refiner(f.refine);
        pipeline::validate(with_refiner);
        const auto t = train_config(toy, file, shift_count, cnn::parse_variant(f.refine));
        if (c.sensor == pipeline::Sensor::LowRes && shift_count != 1) {
            throw UsageError("--shifts-count needs the quarter sensor");
        }
        return std::pair{c, t};
    });
    const auto data = load_dataset(data_dir);
    const auto samples = pipeline::make_training_set(data.images, chain, shift_count);
    std::cerr << "training " << cnn::to_string(config.variant) << " (depth " << config.depth << ", width "
              << config.width << ") on " << samples.size() << " reconstructions for " << config.epochs
              << " epoch(s)\n";
    const cnn::TrainResult result = cnn::train(samples, config);
    cnn::save_model(result.network, model_out);
    const std::string log_dir = out_dir.empty() ? fs::path(model_out).parent_path().string() : out_dir;
    const fs::path log_path = ensure_dir(log_dir) / "train_log.csv";
    cnn::write_training_log(result.log, log_path);
    std::printf("wrote %s (%zu steps, final batch loss %.6g); log %s\n", model_out.c_str(), result.log.size(),
                result.log.empty() ? 0.0 : result.log.back().loss, log_path.string().c_str());
}

// ---- eval / report ----------------------------------------------------------

pipeline::ChainConfig parse_chain_spec(const std::string& spec, const ChainFlags& f,
                                       const pipeline::KeyValueConfig& config) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    for (std::string part; std::getline(in, part, '+');) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3) {
        throw UsageError("--chain expects sensor+recon[+refine], got '" + spec + "'");
    }
    ChainFlags g = f;
    g.sensor = parts[0];
    g.recon = parts[1];
    g.refine = parts.size() == 3 ? parts[2] : "none";
    return chain_from(g, config);
}

void emit_report(const pipeline::EvalReport& report, pipeline::ReportFormat format, const std::string& out_dir) {
    const std::string text = pipeline::generate_report(report, format);
    std::cout << text;
    if (!out_dir.empty()) {
        const fs::path path =
            ensure_dir(out_dir) / (format == pipeline::ReportFormat::Csv ? "report.csv" : "report.md");
        write_text(path, text);
        std::cerr << "wrote " << path.string() << '\n';
    }
}

void cmd_eval(const ChainFlags& f, const std::string& data_dir, const std::vector<std::string>& chain_specs,
              const std::string& format_name, const std::string& out_dir) {
    const auto [chains, border_crop, format] = as_usage([&] {
        const auto file = load_config(f);
        std::vector<pipeline::NamedChain> list;
        if (chain_specs.empty()) {
            auto c = chain_from(f, file);
            list.push_back({c.name(), std::move(c)});
        }
        for (const auto& spec : chain_specs) {
            auto c = parse_chain_spec(spec, f, file);
            list.push_back({c.name(), std::move(c)});
        }
        const int crop = file.get_int("eval.border-crop", 0);
        if (crop < 0) {
            throw UsageError("eval.border-crop must be non-negative");
        }
        return std::tuple{list, crop, pipeline::parse_report_format(format_name)};
    });
    const auto data = load_dataset(data_dir);
    const std::string id = fs::path(data_dir).lexically_normal().filename().string();
    const auto report = pipeline::evaluate_dataset(data.images, chains, border_crop, id.empty() ? data_dir : id);
    emit_report(report, format, out_dir);
}

void cmd_report(const std::string& csv_path, const std::string& format_name, const std::string& out_dir) {
    const auto format = as_usage([&] { return pipeline::parse_report_format(format_name); });
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + csv_path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    emit_report(pipeline::parse_report_csv(buffer.str()), format, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quarter-sampling super-resolution pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qsr 0.1.0");

    ChainFlags flags;
    std::string out_dir;
    std::string input;
    std::string report_format = "markdown";
    std::vector<std::string> chain_specs;
    int shifts_count = 1;
    bool toy = false;

    auto* mask = app.add_subcommand("mask", "Generate or inspect sampling masks");
    mask->require_subcommand(1);
    auto* mask_gen = mask->add_subcommand("gen", "Write a random quarter-sampling mask");
    add_mask_options(*mask_gen, flags);
    add_config_options(*mask_gen, flags);
    mask_gen->add_option("--out-dir", out_dir, "Output directory (mask.txt)");
    auto* mask_show = mask->add_subcommand("show", "Print a mask and its statistics");
    add_mask_options(*mask_show, flags);
    add_config_options(*mask_show, flags);

    auto* sample = app.add_subcommand("sample", "Simulate a sensor on a reference image");
    sample->add_option("input", input, "Reference image")->required();
    sample->add_option("--sensor", flags.sensor, "Sensor model")->check(CLI::IsMember({"lowres", "quarter"}));
    add_config_options(*sample, flags);
    add_mask_options(*sample, flags);
    sample->add_option("--out-dir", out_dir, "Output directory");

    auto* reconstruct = app.add_subcommand("reconstruct", "Run one chain on a reference image");
    reconstruct->add_option("input", input, "Reference image")->required();
    add_chain_options(*reconstruct, flags);
    reconstruct->add_option("--out-dir", out_dir, "Output directory");

    auto* train = app.add_subcommand("train", "Train a refinement network on a directory of images");
    train->add_option("data", input, "Training image directory")->required();
    add_chain_options(*train, flags);
    train->add_option("--shifts-count", shifts_count, "Shifted masks per image")
        ->check(CLI::IsMember({1, 2, 4, 8}));
    train->add_flag("--toy", toy, "Desk-scale profile (depth 6, width 16, 2 epochs, lr 1e-3, batch 16)");
    train->add_option("--out-dir", out_dir, "Directory for the training log (default: next to the model)");

    auto* eval = app.add_subcommand("eval", "Evaluate chains on a directory of images");
    eval->add_option("data", input, "Evaluation image directory")->required();
    add_chain_options(*eval, flags);
    eval->add_option("--chain", chain_specs, "Chain as sensor+recon[+refine]; repeatable");
    eval->add_option("--report", report_format, "Report format")->check(CLI::IsMember({"csv", "markdown"}));
    eval->add_option("--out-dir", out_dir, "Also write the report here");

    auto* report = app.add_subcommand("report", "Render a CSV evaluation report");
    report->add_option("csv", input, "Report CSV written by eval")->required();
    report->add_option("--report", report_format, "Output format")->check(CLI::IsMember({"csv", "markdown"}));
    report->add_option("--out-dir", out_dir, "Also write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (mask_gen->parsed()) {
            cmd_mask_gen(flags, out_dir);
        } else if (mask_show->parsed()) {
            cmd_mask_show(flags);
        } else if (sample->parsed()) {
            cmd_sample(flags, input, out_dir);
        } else if (reconstruct->parsed()) {
            cmd_reconstruct(flags, input, out_dir);
        } else if (train->parsed()) {
            cmd_train(flags, input, shifts_count, toy, out_dir);
        } else if (eval->parsed()) {
            cmd_eval(flags, input, chain_specs, report_format, out_dir);
        } else if (report->parsed()) {
            cmd_report(input, report_format, out_dir);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
