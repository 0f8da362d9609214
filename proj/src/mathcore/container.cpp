#include "symsys/mathcore/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace symsys {
namespace {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'Y', 'M', 'S', 'Y', 'S', 'B', '1'};

std::size_t element_count(const std::vector<std::int64_t>& shape) {
  std::size_t n = 1;
  for (const auto s : shape) {
    if (s < 0) throw std::runtime_error("container: negative extent");
    n *= static_cast<std::size_t>(s);
  }
  return n;
}

}  // namespace

const NamedArray& Container::array(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw std::runtime_error("container: no array named '" + name + "'");
}

void write_container(const std::filesystem::path& path, const Container& c) {
  nlohmann::json header = c.header;
  header["arrays"] = nlohmann::json::array();
  for (const auto& a : c.arrays) {
    if (element_count(a.shape) != a.values.size())
      throw std::invalid_argument("container: array '" + a.name + "' does not match its shape");
    header["arrays"].push_back({{"name", a.name}, {"shape", a.shape}});
  }
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("container: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& a : c.arrays)
    out.write(reinterpret_cast<const char*>(a.values.data()),
              static_cast<std::streamsize>(a.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("container: write failed for " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("container: cannot open " + path.string());
  char magic[8];
  std::uint64_t len = 0;
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("container: bad magic in " + path.string());
  if (!in.read(reinterpret_cast<char*>(&len), sizeof len)) throw std::runtime_error("container: truncated header in " + path.string());
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw std::runtime_error("container: truncated header in " + path.string());

  Container c;
  c.header = nlohmann::json::parse(text);
  for (const auto& entry : c.header.at("arrays")) {
    NamedArray a;
    a.name = entry.at("name").get<std::string>();
    a.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    a.values.resize(element_count(a.shape));
    if (!in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double))))
      throw std::runtime_error("container: truncated payload for '" + a.name + "' in " + path.string());
    c.arrays.push_back(std::move(a));
  }
  c.header.erase("arrays");
  return c;
}

}  // namespace symsys
