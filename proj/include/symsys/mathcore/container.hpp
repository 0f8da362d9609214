#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace symsys {

/// A named float64 array with its logical shape (row-major).
struct NamedArray {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> values;
};

/// Flat binary container shared by datasets, kernel matrices and parameter sets:
///
///   bytes 0..7    magic "SYMSYSB1"
///   bytes 8..15   header length N, little-endian uint64
///   next N bytes  JSON header; its "arrays" member lists {name, shape} in payload order
///   payload       each array as little-endian IEEE-754 float64, row-major
struct Container {
  nlohmann::json header;
  std::vector<NamedArray> arrays;

  const NamedArray& array(const std::string& name) const;
};

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

}  // namespace symsys
