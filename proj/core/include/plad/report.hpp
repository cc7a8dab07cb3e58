#pragma once

#include <string>

#include "plad/experiment.hpp"

namespace plad {

enum class ReportFormat { Json, Csv, Markdown };
/// json, csv, markdown (or md).
ReportFormat parse_report_format(const std::string& name);

/// JSON is lossless (report_from_json inverts it); CSV has one row per
/// (cell, metric); markdown lays the cells out like the published tables.
std::string render_report(const ExperimentReport& report, ReportFormat format);
ExperimentReport report_from_json(const std::string& text);

class IoError : public Error {
 public:
  using Error::Error;
};

/// Writes `text` to `path`; throws IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace plad
