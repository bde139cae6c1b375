#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace rafc {

/// Shortest round-trip-safe decimal with 17 significant digits.
std::string format_real(double value);

/// Header line plus one row per matrix row, comma separated.
std::string csv_text(const std::vector<std::string> &header, const Eigen::MatrixXd &rows);

/// Header labels for time columns, e.g. "0.25".
std::vector<std::string> time_labels(const std::vector<double> &times);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Reads a numeric CSV written by csv_text. Throws ArtifactError when the
/// file is missing or malformed.
CsvTable read_csv(const std::filesystem::path &path);

nlohmann::ordered_json read_json(const std::filesystem::path &path);

/// Throws ArtifactError if `path` is not a regular file.
void require_file(const std::filesystem::path &path);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path &path);

/// Writes files into a run directory and keeps manifest.json up to date.
/// Entries of an existing manifest are kept unless the file is rewritten.
class RunWriter {
public:
  explicit RunWriter(std::filesystem::path dir);

  const std::filesystem::path &dir() const { return dir_; }

  void text(const std::string &name, std::string_view content);
  void csv(const std::string &name, const std::vector<std::string> &header,
           const Eigen::MatrixXd &rows);
  void json(const std::string &name, const nlohmann::ordered_json &doc);

  /// Rewrites manifest.json; called after every file.
  void flush_manifest() const;

private:
  std::filesystem::path dir_;
  nlohmann::ordered_json entries_ = nlohmann::ordered_json::object();
};

} // namespace rafc
