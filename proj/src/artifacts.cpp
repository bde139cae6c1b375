#include "rafc/artifacts.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "rafc/errors.hpp"

namespace rafc {

namespace fs = std::filesystem;

std::string format_real(double value) {
  std::array<char, 40> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string csv_text(const std::vector<std::string> &header, const Eigen::MatrixXd &rows) {
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != rows.cols())
    throw std::invalid_argument("CSV header has " + std::to_string(header.size()) + " columns, data has " +
                                std::to_string(rows.cols()));
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j)
      out += ',';
    out += header[j];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j)
        out += ',';
      out += format_real(rows(i, j));
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> time_labels(const std::vector<double> &times) {
  std::vector<std::string> out;
  out.reserve(times.size());
  for (double t : times)
    out.push_back(format_real(t));
  return out;
}

void require_file(const fs::path &path) {
  if (!fs::is_regular_file(path))
    throw ArtifactError("missing artifact: " + path.string());
}

namespace {

std::string slurp(const fs::path &path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ArtifactError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

} // namespace

CsvTable read_csv(const fs::path &path) {
  std::istringstream in(slurp(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw ArtifactError(path.string() + ": empty CSV");
  table.header = split(line);
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size())
      throw ArtifactError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto &c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != c.size() || c.empty())
        throw ArtifactError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

nlohmann::ordered_json read_json(const fs::path &path) {
  const std::string text = slurp(path);
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ArtifactError(path.string() + ": " + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string file_sha256(const fs::path &path) { return sha256_hex(slurp(path)); }

RunWriter::RunWriter(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  const fs::path manifest = dir_ / "manifest.json";
  if (fs::is_regular_file(manifest)) {
    const auto doc = read_json(manifest);
    if (doc.contains("files") && doc["files"].is_object())
      entries_ = doc["files"];
  }
}

void RunWriter::text(const std::string &name, std::string_view content) {
  const fs::path path = dir_ / name;
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw ArtifactError("cannot write " + path.string());
  }
  entries_[name] = {{"sha256", sha256_hex(content)}, {"bytes", content.size()}};
  flush_manifest();
}

void RunWriter::csv(const std::string &name, const std::vector<std::string> &header,
                    const Eigen::MatrixXd &rows) {
  text(name, csv_text(header, rows));
}

void RunWriter::json(const std::string &name, const nlohmann::ordered_json &doc) {
  text(name, doc.dump(2) + "\n");
}

void RunWriter::flush_manifest() const {
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  std::vector<std::string> names;
  for (auto it = entries_.begin(); it != entries_.end(); ++it)
    names.push_back(it.key());
  std::sort(names.begin(), names.end());
  for (const auto &n : names)
    files[n] = entries_[n];
  const nlohmann::ordered_json doc = {{"schema_version", 1}, {"digest", "sha256"}, {"files", files}};
  const std::string text = doc.dump(2) + "\n";
  std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << text;
  if (!out)
    throw ArtifactError("cannot write " + (dir_ / "manifest.json").string());
}

} // namespace rafc
