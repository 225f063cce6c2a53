#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxsweep/analysis.hpp"
#include "proxsweep/core.hpp"
#include "proxsweep/sweep.hpp"

namespace proxsweep {

using json = nlohmann::json;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trajectory_csv(const Trajectory& traj) {
  const auto n = traj.states.empty() ? 0 : traj.states.front().size();
  std::string out = "t";
  for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  out += ",residual\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out += fmt17(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + fmt17(traj.states[k][i]);
    // row 0 carries no incoming step; later rows report the arriving residual
    out += "," + fmt17(k == 0 ? 0.0 : traj.residuals[k - 1]);
    out += "\n";
  }
  return out;
}

inline json certificate_json(const StabilityCertificate& c) {
  return json{{"alpha", c.alpha},     {"L_C", c.L_C},
              {"M_f", c.M_f},         {"eta", std::isinf(c.eta) ? json("inf") : json(c.eta)},
              {"alpha_bar", c.alpha_bar}, {"applicable", c.applicable}};
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw NumericFailure("cannot open " + path.string() + " for writing");
  os << content;
}

struct ArtifactSink {
  std::filesystem::path dir;
  json artifacts = json::array();

  explicit ArtifactSink(const std::filesystem::path& d) : dir(d) {
    std::filesystem::create_directories(dir);
  }

  void add(const std::string& name, const std::string& content) {
    write_text(dir / name, content);
    artifacts.push_back({{"path", name}, {"checksum", hex64(fnv1a64(content))}});
  }

  void write_manifest(const std::string& command, const json& options, std::uint64_t seed) {
    json m{{"command", command}, {"options", options}, {"seed", seed}, {"artifacts", artifacts}};
    write_text(dir / "manifest.json", m.dump(2) + "\n");
  }
};

}  // namespace proxsweep
