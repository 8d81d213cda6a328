#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpic/csv.hpp"

namespace qpic::cli {

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Collects artifacts of one subcommand run and writes the manifest.
class RunContext {
 public:
  RunContext(std::string command, std::filesystem::path out_dir, bool gnuplot);

  void argument(const std::string& key, nlohmann::json value);
  void input(const std::filesystem::path& path);
  void summary(const std::string& key, nlohmann::json value);

  /// Writes a CSV and registers it.
  void write_csv(const std::string& name, const CsvTable& table);
  void write_text(const std::string& name, const std::string& text);

  /// Plot of column `y` against column `x` of a registered CSV.
  void plot(const std::string& csv, const std::string& x, const std::string& y,
            const std::string& title);

  /// Emits the gnuplot script (if requested) and manifest.json.
  void finish();

  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  bool gnuplot_;
  nlohmann::json arguments_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json summary_ = nlohmann::json::object();
  std::vector<std::string> plots_;
};

}  // namespace qpic::cli
