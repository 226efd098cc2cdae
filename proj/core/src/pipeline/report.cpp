#include "qsr/pipeline/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qsr/error.hpp"

namespace qsr::pipeline {

namespace {

std::string format_value(double v, int precision) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string format_exact(double v) {
    if (!std::isfinite(v)) {
        return format_value(v, 0);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_value(const std::string& text, std::size_t line) {
    if (text == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (text == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw FormatError("");
        }
        return v;
    } catch (const std::exception&) {
        throw FormatError("report line " + std::to_string(line) + ": bad number '" + text + "'");
    }
}

// RFC 4180 style: fields with a comma or quote are quoted, quotes doubled.
std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        out += c;
        if (c == '"') out += '"';
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"' && fields.back().empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) {
        throw FormatError("report line " + std::to_string(line_no) + ": unterminated quote");
    }
    return fields;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "markdown") return ReportFormat::Markdown;
    throw ValidationError("unknown report format '" + std::string(text) + "' (csv|markdown)");
}

std::string generate_report(const EvalReport& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "chain,image,psnr_db,ssim\n";
        for (const auto& chain : report.chains) {
            for (const auto& row : report.rows) {
                if (row.chain == chain) {
                    out << csv_field(row.chain) << ',' << csv_field(row.image) << ','
                        << format_exact(row.psnr) << ','
                        << format_exact(row.ssim) << '\n';
                }
            }
            for (const auto& row : report.means) {
                if (row.chain == chain) {
                    out << csv_field(row.chain) << ",MEAN," << format_exact(row.psnr) << ','
                        << format_exact(row.ssim) << '\n';
                }
            }
        }
        return out.str();
    }

    std::size_t best_psnr = 0;
    std::size_t best_ssim = 0;
    for (std::size_t i = 1; i < report.means.size(); ++i) {
        if (report.means[i].psnr > report.means[best_psnr].psnr) best_psnr = i;
        if (report.means[i].ssim > report.means[best_ssim].ssim) best_ssim = i;
    }
    if (!report.dataset.empty()) {
        out << "Dataset: " << report.dataset << "\n\n";
    }
    if (!report.config.empty()) {
        out << "Configuration:\n\n";
        for (const auto& line : report.config) {
            out << "- `" << line << "`\n";
        }
        out << '\n';
    }
    out << "| Chain | PSNR [dB] | SSIM |\n|---|---:|---:|\n";
    for (std::size_t i = 0; i < report.means.size(); ++i) {
        const auto& m = report.means[i];
        std::string p = format_value(m.psnr, 2);
        std::string s = format_value(m.ssim, 4);
        if (i == best_psnr) p = "**" + p + "**";
        if (i == best_ssim) s = "**" + s + "**";
        out << "| " << m.chain << " | " << p << " | " << s << " |\n";
    }
    out << "\n| Chain | Image | PSNR [dB] | SSIM |\n|---|---|---:|---:|\n";
    for (const auto& chain : report.chains) {
        for (const auto& row : report.rows) {
            if (row.chain == chain) {
                out << "| " << row.chain << " | " << row.image << " | " << format_value(row.psnr, 2)
                    << " | " << format_value(row.ssim, 4) << " |\n";
            }
        }
    }
    return out.str();
}

EvalReport parse_report_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || (line != "chain,image,psnr_db,ssim" && line != "chain,image,psnr_db,ssim\r")) {
        throw FormatError("report CSV must start with 'chain,image,psnr_db,ssim'");
    }
    EvalReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line, line_no);
        if (fields.size() != 4 || fields[0].empty() || fields[1].empty()) {
            throw FormatError("report line " + std::to_string(line_no) + ": expected 4 fields");
        }
        EvalRow row{fields[0], fields[1], parse_value(fields[2], line_no), parse_value(fields[3], line_no)};
        bool known = false;
        for (const auto& c : report.chains) known = known || c == row.chain;
        if (!known) report.chains.push_back(row.chain);
        if (row.image == "MEAN") {
            report.means.push_back(std::move(row));
        } else {
            report.rows.push_back(std::move(row));
        }
    }
    if (report.chains.empty()) {
        throw FormatError("report CSV has no rows");
    }
    return report;
}

}  // namespace qsr::pipeline
