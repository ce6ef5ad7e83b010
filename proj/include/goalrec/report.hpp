#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace goalrec {

/// One cell group of the accuracy/time table. A missing accuracy marks a
/// method that cannot handle the domain and prints as "-".
struct ReportRow {
  std::string method;
  std::string domain;
  std::string setting;
  double ratio = 0.0;
  std::optional<double> accuracy;  // percent
  std::optional<double> seconds;   // mean per prediction
  bool operator==(const ReportRow&) const = default;
};

struct EvalReport {
  std::vector<ReportRow> rows;

  /// Stable order: method, setting, ratio.
  void sort();
  void append(const EvalReport& other);
  bool operator==(const EvalReport&) const = default;
};

enum class ReportFormat { csv, table };

std::string to_csv(const EvalReport& r);
std::string to_table(const EvalReport& r);
EvalReport parse_csv(std::string_view text);
void emit_report(const EvalReport& r, ReportFormat format, const std::filesystem::path& path);

}  // namespace goalrec
