#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "pevp/cli.hpp"
#include "pevp/io.hpp"

#ifndef PEVP_VERSION
#define PEVP_VERSION "dev"
#endif

namespace pevp::cli {

std::string tool_version() { return PEVP_VERSION; }

std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorKind::InvalidArgument, "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string problem_hash(const std::string& spec) {
  constexpr std::string_view prefix = "config:";
  if (spec.rfind(prefix, 0) != 0) return "builtin";
  return sha256_hex(read_file(spec.substr(prefix.size())));
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = value;
      return;
    }
  }
  params.emplace_back(key, value);
}

std::string RunManifest::render() const {
  std::ostringstream ss;
  ss << "command = " << command << '\n';
  ss << "tool_version = " << tool_version() << '\n';
  for (const auto& [k, v] : params) ss << k << " = " << v << '\n';
  ss << "seed = " << (seed ? std::to_string(*seed) : std::string("none")) << '\n';
  ss << "config_hash = " << config_hash << '\n';
  for (const auto& o : outputs) ss << "output = " << o << '\n';
  return ss.str();
}

}  // namespace pevp::cli
