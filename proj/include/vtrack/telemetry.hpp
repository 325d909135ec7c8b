#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vtrack {

/// Column-named table of doubles with flat row-major storage.
class TelemetryLog {
 public:
  TelemetryLog() = default;
  explicit TelemetryLog(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const {
    return columns_.empty() ? 0 : data_.size() / columns_.size();
  }

  /// Throws DataError if the row width does not match the column count.
  void add_row(std::span<const double> row);
  void add_row(std::initializer_list<double> row) {
    add_row(std::span<const double>(row.begin(), row.size()));
  }

  double at(std::size_t row, std::size_t col) const {
    return data_[row * columns_.size() + col];
  }

  /// Index of a named column; throws DataError naming the column if absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;

 private:
  std::vector<std::string> columns_;
  std::vector<double> data_;
};

/// Writes the log as CSV. Values are printed with enough digits (%.17g)
/// that read_csv restores them bit-exactly, which is what makes
/// metrics-from-file agree with in-memory metrics to the last ulp.
void write_csv(const TelemetryLog& log, const std::string& path);

/// Parses a CSV produced by write_csv (or any header + numeric rows file).
/// Throws DataError with a line reference on malformed content.
TelemetryLog read_csv(const std::string& path);

/// `key=value` flat text, one per line.
void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> read_kv(
    const std::string& path);

/// Renders a double so that parsing it back returns the identical bits.
std::string format_double(double v);

/// Writes one two-column CSV per plot panel into out_dir:
///   path_xy.csv (X, Y), lateral_error.csv, yaw_error.csv,
///   speed_error.csv (t, e_*), torque.csv (t, T_w), steer.csv (t, delta).
/// Throws DataError naming any missing source column.
void emit_plot_data(const TelemetryLog& log, const std::string& out_dir);

}  // namespace vtrack
