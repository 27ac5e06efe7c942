#include "pensim/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <nlohmann/json.hpp>

#include "pensim/csv.hpp"
#include "pensim/rng.hpp"

namespace pensim {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::string& path) {
  return "fnv1a64:" + fnv1a64_hex(read_text_file(path));
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, file_digest(path));
}

void RunManifest::write(const std::string& out_dir) const {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["threads"] = threads;
  j["rng_algorithm"] = kRngAlgorithm;

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  j["created_utc"] = stamp;

  j["config"] = config;
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& [path, digest] : inputs) {
    ins.push_back({{"path", path}, {"digest", digest}});
  }
  j["inputs"] = ins;
  j["outputs"] = outputs;
  write_text_file(out_dir + "/manifest.json", j.dump(1) + "\n");
}

}  // namespace pensim
