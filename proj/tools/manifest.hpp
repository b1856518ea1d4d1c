#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sgid::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Run record written next to every output. It carries no timestamps or host
/// details, so rerunning from it reproduces the same bytes.
struct Manifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::string> overrides;  // flags given on the command line
  std::string config_file;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::filesystem::path> data_files;

  void write(const std::filesystem::path& out_dir) const;
};

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace sgid::cli
