#pragma once

#include <string>
#include <string_view>

#include "qsr/pipeline/chain.hpp"

namespace qsr::pipeline {

enum class ReportFormat { Csv, Markdown };

[[nodiscard]] ReportFormat parse_report_format(std::string_view text);

/// CSV: header "chain,image,psnr_db,ssim", detail rows followed by one MEAN row
/// per chain; values keep full double precision, infinity is written as "inf".
/// Markdown: a summary table with the best PSNR and SSIM in bold, then details.
[[nodiscard]] std::string generate_report(const EvalReport& report, ReportFormat format);

/// Reads the CSV produced by generate_report. Throws FormatError on malformed input.
[[nodiscard]] EvalReport parse_report_csv(std::string_view text);

}  // namespace qsr::pipeline
