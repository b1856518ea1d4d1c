#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "sgid/error.hpp"
#include "sgid/kernels.hpp"

namespace sgid::cli {

namespace {

class Hasher {
 public:
  Hasher() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialization failed");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kDigits[md[i] >> 4];
      out += kDigits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Hasher h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Hasher h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void Manifest::write(const std::filesystem::path& out_dir) const {
  auto digests = [](const std::vector<std::filesystem::path>& paths, bool name_only) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : paths) {
      a.push_back({{"path", name_only ? p.filename().string() : p.string()},
                   {"sha256", sha256_file(p)}});
    }
    return a;
  };
  nlohmann::json j{
      {"tool", "sgid"},
      {"version", std::string(kToolVersion)},
      {"command", command},
      {"config", config},
      {"overrides", overrides},
      {"config_file", config_file},
      {"seed", config.value("seed", 0)},
      {"kernel_backend", std::string(kernels::backend_name(kernels::active_backend()))},
      {"inputs", digests(inputs, false)},
      {"data_files", digests(data_files, true)},
      {"outputs", digests(outputs, true)},
  };
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot write manifest in " + out_dir.string());
  out << j.dump(2) << '\n';
}

}  // namespace sgid::cli
