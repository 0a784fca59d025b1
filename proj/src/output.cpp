#include "qls/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace qls {

namespace fs = std::filesystem;
using nlohmann::json;

const char* tool_version() { return "qls 1.0.0"; }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialization failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

RunManifest::RunManifest(std::string out_dir, std::string command, json config)
    : out_dir_(std::move(out_dir)) {
  fs::create_directories(out_dir_);
  doc_["tool_version"] = tool_version();
  doc_["command"] = std::move(command);
  doc_["config"] = std::move(config);
  doc_["stages"] = json::array();
  write("running");
}

std::string RunManifest::file(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return (fs::path(out_dir_) / name).string();
}

void RunManifest::begin_stage(const std::string& name) {
  if (!stage_.empty()) end_stage();
  stage_ = name;
  stage_start_ = std::chrono::steady_clock::now();
}

void RunManifest::end_stage() {
  if (stage_.empty()) return;
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - stage_start_).count();
  doc_["stages"].push_back({{"name", stage_}, {"seconds", s}});
  stage_.clear();
}

void RunManifest::set(const std::string& key, json value) { doc_[key] = std::move(value); }

void RunManifest::finalize(int exit_code) {
  end_stage();
  json inventory = json::array();
  for (const auto& name : files_) {
    const std::string path = (fs::path(out_dir_) / name).string();
    if (!fs::exists(path)) continue;
    inventory.push_back({{"path", name}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}});
  }
  doc_["files"] = inventory;
  doc_["exit_code"] = exit_code;
  write(exit_code == 0 ? "finished" : "failed");
}

void RunManifest::write(const std::string& status) const {
  json d = doc_;
  d["status"] = status;
  write_json((fs::path(out_dir_) / "manifest.json").string(), d);
}

void write_gnuplot(const std::string& path, const PlotSpec& spec,
                   const std::vector<std::string>& header) {
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("plot column " + name + " not in CSV header");
    return static_cast<int>(it - header.begin()) + 1;
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::string png = fs::path(path).stem().string() + ".png";
  out << "set datafile separator ','\n"
      << "set terminal pngcairo size 900,600\n"
      << "set output '" << png << "'\n"
      << "set title '" << spec.title << "'\n"
      << "set xlabel '" << spec.x << "'\n"
      << "set key outside\n";
  if (spec.log_x) out << "set logscale x\n";
  if (spec.log_y) out << "set logscale y\n";
  const int xc = column(spec.x);
  std::vector<std::string> series;
  for (const auto& y : spec.y) {
    const int yc = column(y);
    if (spec.group.empty()) {
      series.push_back("'" + spec.csv + "' every ::1 using " + std::to_string(xc) + ":" +
                       std::to_string(yc) + " with linespoints title '" + y + "'");
    } else {
      const int gc = column(spec.group);
      for (const auto& g : spec.groups)
        series.push_back("'" + spec.csv + "' every ::1 using " + std::to_string(xc) + ":(strcol(" +
                         std::to_string(gc) + ") eq '" + g + "' ? $" + std::to_string(yc) +
                         " : NaN) with linespoints title '" + y + " " + g + "'");
    }
  }
  out << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) out << (i ? ", \\\n     " : "") << series[i];
  out << "\n";
}

}  // namespace qls
