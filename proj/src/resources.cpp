#include "sgid/resources.hpp"

#include <cstdlib>

#include "sgid/error.hpp"

#ifndef SGID_DEFAULT_DATA_DIR
#define SGID_DEFAULT_DATA_DIR "data"
#endif

namespace sgid {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SGID_DATA_DIR"); env && *env) return env;
  return SGID_DEFAULT_DATA_DIR;
}

std::filesystem::path data_file(const char* name) {
  auto p = data_dir() / name;
  if (!std::filesystem::exists(p)) throw DataError("missing data file: " + p.string());
  return p;
}

}  // namespace sgid
