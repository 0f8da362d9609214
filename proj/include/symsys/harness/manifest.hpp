#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "symsys/training/train.hpp"

namespace symsys {

/// Library, algorithm and toolchain versions recorded with every run.
nlohmann::json artifact_versions();

/// Run-directory bookkeeping. `start` stamps the wall clock; `finish` writes
/// manifest.json = {config, preset, seeds, versions, started, elapsed}.
/// The manifest is the only output that depends on the clock.
class RunManifest {
 public:
  RunManifest(std::filesystem::path out, nlohmann::json config, std::string preset);
  const std::filesystem::path& dir() const { return out_; }
  const nlohmann::json& config() const { return config_; }
  void finish() const;

 private:
  std::filesystem::path out_;
  nlohmann::json config_;
  std::string preset_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
};

/// Serializes file writes from concurrent cells. Text is written whole, so
/// every file's bytes depend only on what its producer computed.
class ResultSink {
 public:
  explicit ResultSink(std::filesystem::path dir);
  const std::filesystem::path& dir() const { return dir_; }
  void write_text(const std::string& name, std::string_view text);
  void write_json(const std::string& name, const nlohmann::json& j);
  /// RunRecord JSON and metrics CSV under <dir>/runs, named by digest.
  void write_record(const RunRecord& record);

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

}  // namespace symsys
