#pragma once

#include <filesystem>

namespace sgid {

/// Directory holding the bundled data files (lexicon, groups, tables).
/// SGID_DATA_DIR in the environment overrides the build-time default.
std::filesystem::path data_dir();

/// data_dir() / name, throwing DataError when the file does not exist.
std::filesystem::path data_file(const char* name);

}  // namespace sgid
