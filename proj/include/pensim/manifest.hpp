#ifndef PENSIM_MANIFEST_HPP
#define PENSIM_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pensim {

inline constexpr const char* kToolName = "pensim";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit digest, hex-encoded; used to fingerprint input files.
std::string fnv1a64_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

// Every output directory gets exactly one manifest recording the effective
// configuration, the seeds, and input digests: a run is reproducible from
// its manifest alone.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 0;
  std::map<std::string, std::string> config;      // effective settings
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
  std::vector<std::string> outputs;               // file names inside the directory

  void add_input(const std::string& path);
  void write(const std::string& out_dir) const;
};

}  // namespace pensim

#endif  // PENSIM_MANIFEST_HPP
