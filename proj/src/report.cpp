#include "goalrec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "goalrec/dataset.hpp"

namespace goalrec {

namespace {

constexpr std::string_view kHeader = "method,domain,setting,ratio,accuracy,seconds";

std::string number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : "-"; }

double parse_number(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("report line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void EvalReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.method, a.setting, a.ratio) < std::tie(b.method, b.setting, b.ratio);
  });
}

void EvalReport::append(const EvalReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string to_csv(const EvalReport& r) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& row : r.rows) {
    out += row.method + ',' + row.domain + ',' + row.setting + ',' + number(row.ratio) + ',' +
           optional_number(row.accuracy) + ',' + optional_number(row.seconds) + '\n';
  }
  return out;
}

EvalReport parse_csv(std::string_view text) {
  EvalReport r;
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (lineno == 1) {
      if (line != kHeader) throw IoError("report: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 6) throw IoError("report line " + std::to_string(lineno) + ": expected 6 fields");
    ReportRow row{std::string(f[0]), std::string(f[1]), std::string(f[2]), parse_number(f[3], lineno),
                  std::nullopt, std::nullopt};
    if (f[4] != "-") row.accuracy = parse_number(f[4], lineno);
    if (f[5] != "-") row.seconds = parse_number(f[5], lineno);
    r.rows.push_back(std::move(row));
  }
  if (lineno == 0) throw IoError("report: missing header");
  return r;
}

std::string to_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> cells{{"method", "domain", "setting", "ratio", "accuracy", "seconds"}};
  char buf[64];
  for (const auto& row : r.rows) {
    std::vector<std::string> c{row.method, row.domain, row.setting};
    std::snprintf(buf, sizeof buf, "%.1f", row.ratio);
    c.emplace_back(buf);
    if (row.accuracy) {
      std::snprintf(buf, sizeof buf, "%.1f", *row.accuracy);
      c.emplace_back(buf);
    } else {
      c.emplace_back("-");
    }
    if (row.seconds) {
      std::snprintf(buf, sizeof buf, "%.3g", *row.seconds);
      c.emplace_back(buf);
    } else {
      c.emplace_back("-");
    }
    cells.push_back(std::move(c));
  }
  std::vector<std::size_t> width(6, 0);
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.size(); ++i) width[i] = std::max(width[i], c[i].size());
  }
  std::ostringstream out;
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      // text columns left-aligned, numbers right-aligned
      bool left = i < 3;
      std::size_t pad = width[i] - c[i].size();
      if (i) out << "  ";
      if (!left) out << std::string(pad, ' ');
      out << c[i];
      if (left && i + 1 < c.size()) out << std::string(pad, ' ');
    }
    out << '\n';
  }
  return out.str();
}

void emit_report(const EvalReport& r, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (format == ReportFormat::csv ? to_csv(r) : to_table(r));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace goalrec
