#include "vtrack/telemetry.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vtrack/errors.hpp"

namespace vtrack {

void TelemetryLog::add_row(std::span<const double> row) {
  if (row.size() != columns_.size()) {
    throw DataError("telemetry row width " + std::to_string(row.size()) +
                    " does not match " + std::to_string(columns_.size()) +
                    " columns");
  }
  data_.insert(data_.end(), row.begin(), row.end());
}

std::size_t TelemetryLog::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw DataError("telemetry column missing: " + name);
}

bool TelemetryLog::has_column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c == name) return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const TelemetryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  const auto& cols = log.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << (c ? "," : "") << cols[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < log.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out << (c ? "," : "") << format_double(log.at(r, c));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TelemetryLog read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  TelemetryLog log(split_csv_line(line));
  const std::size_t ncols = log.columns().size();
  std::vector<double> row(ncols);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != ncols) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected " + std::to_string(ncols) + " cells, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      char* end = nullptr;
      row[c] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str()) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": not a number: '" + cells[c] + "'");
      }
    }
    log.add_row(row);
  }
  return log;
}

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  if (!out) throw DataError("write failed: " + path);
}

std::vector<std::pair<std::string, std::string>> read_kv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ": malformed line: " + line);
    }
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

namespace {

void emit_panel(const TelemetryLog& log, const std::string& dir,
                const std::string& file, const std::string& xcol,
                const std::string& ycol) {
  const std::size_t xi = log.column(xcol);
  const std::size_t yi = log.column(ycol);
  TelemetryLog panel({xcol, ycol});
  for (std::size_t r = 0; r < log.rows(); ++r) {
    const double row[2] = {log.at(r, xi), log.at(r, yi)};
    panel.add_row(row);
  }
  write_csv(panel, dir + "/" + file);
}

}  // namespace

void emit_plot_data(const TelemetryLog& log, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  emit_panel(log, out_dir, "path_xy.csv", "X", "Y");
  emit_panel(log, out_dir, "lateral_error.csv", "t", "e_lat");
  emit_panel(log, out_dir, "yaw_error.csv", "t", "e_psi");
  emit_panel(log, out_dir, "speed_error.csv", "t", "e_v");
  emit_panel(log, out_dir, "torque.csv", "t", "T_w");
  emit_panel(log, out_dir, "steer.csv", "t", "delta");
}

}  // namespace vtrack
