#include "symsys/harness/manifest.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

#include <Eigen/Core>

#include "symsys/mathcore/rng.hpp"

namespace symsys {

nlohmann::json artifact_versions() {
  return {{"symsys", "0.1.0"},
          {"rng", Rng::kAlgorithm},
          {"container", "SYMSYSB1"},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__},
          {"openmp", _OPENMP}};
}

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunManifest::RunManifest(std::filesystem::path out, nlohmann::json config, std::string preset)
    : out_(std::move(out)),
      config_(std::move(config)),
      preset_(std::move(preset)),
      started_(utc_now()),
      t0_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(out_);
}

void RunManifest::finish() const {
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  // Run seeds are base + s for s < seeds (the experiments' convention).
  nlohmann::json seeds = nlohmann::json::array();
  const std::uint64_t base = config_.value("seed", std::uint64_t{0});
  for (int s = 0; s < config_.value("seeds", 1); ++s) seeds.push_back(base + static_cast<std::uint64_t>(s));
  const nlohmann::json m = {{"config", config_},
                            {"preset", preset_},
                            {"seeds", seeds},
                            {"versions", artifact_versions()},
                            {"started", started_},
                            {"elapsed", elapsed}};
  write_file(out_ / "manifest.json", m.dump(2) + "\n");
}

ResultSink::ResultSink(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

void ResultSink::write_text(const std::string& name, std::string_view text) {
  const std::lock_guard lock(mutex_);
  const auto path = dir_ / name;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file(path, text);
}

void ResultSink::write_json(const std::string& name, const nlohmann::json& j) { write_text(name, j.dump(2) + "\n"); }

void ResultSink::write_record(const RunRecord& record) {
  const std::lock_guard lock(mutex_);
  write_run_record((dir_ / "runs").string(), record);
}

}  // namespace symsys
