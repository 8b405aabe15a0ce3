#pragma once

#include <openssl/evp.h>

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "../data/csv.hpp"
#include "../error.hpp"

#ifndef TSDBN_VERSION
#define TSDBN_VERSION "0.0.0"
#endif

namespace tsdbn {

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct FileHash {
  std::string role;  // inputs only: data, schema, knowledge, external.<name>
  std::string path;  // outputs: relative to the output directory
  std::string sha256;
};

struct StageRecord {
  std::string name;
  std::string status;  // ok, failed, skipped
  double seconds = 0.0;
  std::string error;
  int exit_code = 0;
};

// Everything needed to re-run a pipeline and check its outputs: the resolved
// configuration, input and output hashes, tool version and per-stage timing.
struct RunManifest {
  std::string version = TSDBN_VERSION;
  std::string config;
  std::vector<FileHash> inputs;
  std::vector<FileHash> outputs;
  std::vector<StageRecord> stages;

  bool complete() const {
    for (const auto& s : stages)
      if (s.status == "failed") return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = "tsdbn";
    j["version"] = version;
    j["config"] = config;
    j["complete"] = complete();
    j["inputs"] = nlohmann::json::array();
    for (const auto& f : inputs) j["inputs"].push_back({{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& f : outputs) j["outputs"].push_back({{"path", f.path}, {"sha256", f.sha256}});
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages) {
      nlohmann::json e{{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}};
      if (!s.error.empty()) e["error"] = s.error;
      j["stages"].push_back(std::move(e));
    }
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    try {
      RunManifest m;
      m.version = j.at("version").get<std::string>();
      m.config = j.at("config").get<std::string>();
      for (const auto& f : j.at("inputs"))
        m.inputs.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                            f.at("sha256").get<std::string>()});
      for (const auto& f : j.at("outputs"))
        m.outputs.push_back({"", f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
      for (const auto& s : j.at("stages"))
        m.stages.push_back({s.at("name").get<std::string>(), s.at("status").get<std::string>(),
                            s.at("seconds").get<double>(), s.value("error", std::string()), 0});
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed manifest: ") + e.what());
    }
  }

  static RunManifest load(const std::string& path) {
    const std::string text = read_file(path);
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("'" + path + "': " + e.what());
    }
  }
};

}  // namespace tsdbn
