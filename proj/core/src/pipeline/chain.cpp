#include "qsr/pipeline/chain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

#include "qsr/cnn/model_io.hpp"
#include "qsr/cnn/refine.hpp"
#include "qsr/error.hpp"
#include "qsr/metrics.hpp"
#include "qsr/resample.hpp"
#include "qsr/sensor.hpp"

namespace qsr::pipeline {

std::string_view to_string(Sensor s) noexcept { return s == Sensor::LowRes ? "lowres" : "quarter"; }

std::string_view to_string(Reconstructor r) noexcept {
    return r == Reconstructor::Bicubic ? "bicubic" : "fsr";
}

std::string_view to_string(Refiner r) noexcept {
    switch (r) {
        case Refiner::None: return "none";
        case Refiner::Vdsr: return "vdsr";
        case Refiner::VdsrQs: return "vdsr-qs";
    }
    return "none";
}

Sensor parse_sensor(std::string_view text) {
    if (text == "lowres") return Sensor::LowRes;
    if (text == "quarter") return Sensor::Quarter;
    throw ValidationError("unknown sensor '" + std::string(text) + "' (lowres|quarter)");
}

Reconstructor parse_reconstructor(std::string_view text) {
    if (text == "bicubic") return Reconstructor::Bicubic;
    if (text == "fsr") return Reconstructor::Fsr;
    throw ValidationError("unknown reconstructor '" + std::string(text) + "' (bicubic|fsr)");
}

Refiner parse_refiner(std::string_view text) {
    if (text == "none") return Refiner::None;
    if (text == "vdsr") return Refiner::Vdsr;
    if (text == "vdsr-qs") return Refiner::VdsrQs;
    throw ValidationError("unknown refiner '" + std::string(text) + "' (none|vdsr|vdsr-qs)");
}

std::string ChainConfig::name() const {
    std::string n = std::string(to_string(sensor)) + "+" + std::string(to_string(reconstructor));
    if (refiner != Refiner::None) {
        n += "+" + std::string(to_string(refiner));
    }
    return n;
}

std::string ChainConfig::describe() const {
    std::ostringstream out;
    out << "sensor=" << to_string(sensor) << " recon=" << to_string(reconstructor)
        << " refine=" << to_string(refiner);
    if (sensor == Sensor::Quarter) {
        // FNV-1a over the base mask bits identifies the pattern compactly.
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (std::uint8_t b : base_mask.bits()) {
            hash = (hash ^ b) * 0x100000001b3ULL;
        }
        out << " mask=" << base_mask.width() << "x" << base_mask.height() << ":" << std::hex << hash
            << std::dec << " shift=" << shift.first << "," << shift.second << " fsr.block="
            << fsr.block_size << " fsr.border=" << fsr.border << " fsr.iterations=" << fsr.iterations
            << " fsr.rho=" << fsr.rho << " fsr.gamma=" << fsr.gamma << " fsr.mode="
            << (fsr.mode == FsrMode::IndependentBlocks ? "independent" : "sequential");
    }
    if (refiner != Refiner::None) {
        out << " model=" << (model_path.empty() ? std::string("<in-memory>") : model_path.string());
    }
    return out.str();
}

void validate(const ChainConfig& config) {
    if (config.sensor == Sensor::LowRes && config.reconstructor != Reconstructor::Bicubic) {
        throw ValidationError("the lowres sensor requires --recon bicubic");
    }
    if (config.sensor == Sensor::Quarter && config.reconstructor != Reconstructor::Fsr) {
        throw ValidationError("the quarter sensor requires --recon fsr");
    }
    if (config.refiner == Refiner::VdsrQs && config.sensor != Sensor::Quarter) {
        throw ValidationError("vdsr-qs requires --sensor quarter --recon fsr");
    }
    qsr::validate(config.fsr);
}

void resolve_model(ChainConfig& config) {
    if (config.refiner == Refiner::None || config.model) {
        return;
    }
    if (config.model_path.empty()) {
        throw ValidationError("refiner " + std::string(to_string(config.refiner)) +
                              " needs a model (--model)");
    }
    config.model = std::make_shared<const cnn::Network>(cnn::load_model(config.model_path));
}

SamplingMask chain_mask(const ChainConfig& config, int width, int height) {
    return tile_mask(shift_mask(config.base_mask, config.shift.first, config.shift.second), width,
                     height);
}

ChainOutput run_chain(const Image& reference, const ChainConfig& config) {
    validate(config);
    if (reference.width() % 2 != 0 || reference.height() % 2 != 0) {
        throw DimensionError("chain input must have even dimensions");
    }
    std::shared_ptr<const cnn::Network> model = config.model;
    if (config.refiner != Refiner::None && !model) {
        ChainConfig copy = config;
        resolve_model(copy);
        model = copy.model;
    }

    ChainOutput out;
    if (config.sensor == Sensor::LowRes) {
        out.intermediate = bicubic_upscale_x2(simulate_lowres(reference));
    } else {
        SamplingMask mask = chain_mask(config, reference.width(), reference.height());
        out.intermediate = fsr_reconstruct(simulate_quarter(reference, mask), config.fsr);
        out.mask = std::move(mask);
    }
    switch (config.refiner) {
        case Refiner::None: out.output = out.intermediate; break;
        case Refiner::Vdsr: out.output = cnn::apply_vdsr(*model, out.intermediate); break;
        case Refiner::VdsrQs: out.output = cnn::apply_vdsr_qs(*model, out.intermediate, *out.mask); break;
    }
    return out;
}

std::vector<cnn::TrainingSample> make_training_set(std::span<const NamedImage> images,
                                                   const ChainConfig& config, int shift_count) {
    validate(config);
    const auto shifts = augmentation_shifts(shift_count);
    if (config.sensor == Sensor::LowRes && shift_count != 1) {
        throw ValidationError("shifted-mask augmentation needs the quarter sensor");
    }
    std::vector<cnn::TrainingSample> samples;
    for (const auto& named : images) {
        if (config.sensor == Sensor::LowRes) {
            samples.push_back({bicubic_upscale_x2(simulate_lowres(named.image)), named.image, std::nullopt});
            continue;
        }
        for (const auto& shift : shifts) {
            ChainConfig shifted = config;
            shifted.shift = {config.shift.first + shift.first, config.shift.second + shift.second};
            SamplingMask mask = chain_mask(shifted, named.image.width(), named.image.height());
            Image rec = fsr_reconstruct(simulate_quarter(named.image, mask), config.fsr);
            samples.push_back({std::move(rec), named.image, std::move(mask)});
        }
    }
    return samples;
}

namespace {

// Rethrows `e` as the same error type with `prefix` prepended to the message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix) {
    const std::string message = prefix + e.what();
    if (dynamic_cast<const IoError*>(&e)) throw IoError(message);
    if (dynamic_cast<const FormatError*>(&e)) throw FormatError(message);
    if (dynamic_cast<const UnsupportedFormatError*>(&e)) throw UnsupportedFormatError(message);
    if (dynamic_cast<const DimensionError*>(&e)) throw DimensionError(message);
    if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(message);
    if (dynamic_cast<const NumericError*>(&e)) throw NumericError(message);
    throw Error(message);
}

}  // namespace

EvalReport evaluate_dataset(std::span<const NamedImage> images, std::span<const NamedChain> chains,
                            int border_crop, std::string dataset_id) {
    if (images.empty()) {
        throw ValidationError("evaluation dataset is empty");
    }
    std::vector<const NamedImage*> sorted;
    for (const auto& img : images) {
        sorted.push_back(&img);
    }
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const NamedImage* a, const NamedImage* b) { return a->name < b->name; });

    EvalReport report;
    report.dataset = std::move(dataset_id);
    report.config.push_back("border-crop = " + std::to_string(border_crop));
    for (const auto& named_chain : chains) {
        ChainConfig config = named_chain.config;
        validate(config);
        resolve_model(config);
        report.chains.push_back(named_chain.name);
        report.config.push_back(named_chain.name + ": " + config.describe());
        double psnr_sum = 0.0;
        double ssim_sum = 0.0;
        for (const NamedImage* img : sorted) {
            try {
                const ChainOutput result = run_chain(img->image, config);
                const Image out = crop_border(result.output, border_crop);
                const Image ref = crop_border(img->image, border_crop);
                EvalRow row{named_chain.name, img->name, psnr(out, ref), ssim(out, ref)};
                psnr_sum += row.psnr;
                ssim_sum += row.ssim;
                report.rows.push_back(std::move(row));
            } catch (const Error& e) {
                rethrow_with_context(e, "chain " + named_chain.name + ", image " + img->name + ": ");
            }
        }
        const auto n = static_cast<double>(sorted.size());
        report.means.push_back({named_chain.name, "MEAN", psnr_sum / n, ssim_sum / n});
    }
    return report;
}

}  // namespace qsr::pipeline
