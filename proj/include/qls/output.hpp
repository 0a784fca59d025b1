#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

namespace qls {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Run manifest: written when a run starts and rewritten with timings and the
/// hashed file inventory when it finishes.
class RunManifest {
 public:
  RunManifest(std::string out_dir, std::string command, nlohmann::json config);

  const std::string& out_dir() const { return out_dir_; }
  /// Path inside the output directory; the file is recorded for hashing.
  std::string file(const std::string& name);
  void begin_stage(const std::string& name);
  void end_stage();
  void set(const std::string& key, nlohmann::json value);
  void finalize(int exit_code);

 private:
  void write(const std::string& status) const;

  std::string out_dir_;
  nlohmann::json doc_;
  std::vector<std::string> files_;
  std::string stage_;
  std::chrono::steady_clock::time_point stage_start_;
};

void write_json(const std::string& path, const nlohmann::json& j);

/// gnuplot script plotting columns of a CSV (by header name) against a column.
struct PlotSpec {
  std::string title;
  std::string csv;
  std::string x;
  std::vector<std::string> y;
  bool log_x = false;
  bool log_y = false;
  std::string group;  ///< optional column name to split series by (e.g. variant)
  std::vector<std::string> groups;
};
void write_gnuplot(const std::string& path, const PlotSpec& spec,
                   const std::vector<std::string>& header);

const char* tool_version();

}  // namespace qls
