#include "symsys/networks/spec.hpp"

#include <cmath>
#include <stdexcept>

namespace symsys {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::FCN: return "FCN";
    case ModelKind::LCN: return "LCN";
    case ModelKind::VEC: return "VEC";
    case ModelKind::GAP: return "GAP";
    case ModelKind::LAP: return "LAP";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "FCN") return ModelKind::FCN;
  if (name == "LCN") return ModelKind::LCN;
  if (name == "VEC") return ModelKind::VEC;
  if (name == "GAP") return ModelKind::GAP;
  if (name.starts_with("LAP")) return ModelKind::LAP;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

NetworkSpec with_model_name(NetworkSpec base, std::string_view name) {
  base.kind = parse_model_kind(name);
  if (base.kind == ModelKind::LAP && name.size() > 3) {
    std::string digits;
    for (const char ch : name.substr(3))
      if (ch >= '0' && ch <= '9') digits.push_back(ch);
    if (digits.empty()) throw std::invalid_argument("bad LAP window in '" + std::string(name) + "'");
    base.pool_window = std::stoi(digits);
  }
  return base;
}

std::string NetworkSpec::name() const {
  if (kind == ModelKind::LAP) return "LAP(" + std::to_string(pool_window) + ")";
  return std::string(to_string(kind));
}

void NetworkSpec::validate() const {
  grid.validate();
  if (depth < 1) throw std::invalid_argument("NetworkSpec: depth must be at least 1");
  if (width < 1) throw std::invalid_argument("NetworkSpec: width must be at least 1");
  if (outputs < 1) throw std::invalid_argument("NetworkSpec: need at least one output");
  if (!(sigma_w2 >= 0.0) || !(sigma_b2 >= 0.0)) throw std::invalid_argument("NetworkSpec: variances must be nonnegative");
  if (conv()) {
    if (half_window < 0) throw std::invalid_argument("NetworkSpec: negative window");
    const int span = 2 * half_window + 1;
    if ((grid.height > 1 && span > grid.height) || (grid.width > 1 && span > grid.width))
      throw std::invalid_argument("NetworkSpec: conv window " + std::to_string(span) + " exceeds the grid");
  }
  if (kind == ModelKind::LAP) {
    if (pool_window < 1 || grid.height % pool_window != 0 || grid.width % pool_window != 0)
      throw std::invalid_argument("NetworkSpec: LAP window " + std::to_string(pool_window) + " must divide the grid");
  }
}

std::vector<std::pair<int, int>> NetworkSpec::offsets() const {
  const int kh = grid.height > 1 ? half_window : 0;
  const int kw = grid.width > 1 ? half_window : 0;
  std::vector<std::pair<int, int>> out;
  for (int dh = -kh; dh <= kh; ++dh)
    for (int dw = -kw; dw <= kw; ++dw) out.emplace_back(dh, dw);
  return out;
}

std::vector<std::vector<int>> NetworkSpec::offset_sources() const {
  std::vector<std::vector<int>> src;
  for (const auto& [dh, dw] : offsets()) {
    std::vector<int> row(static_cast<std::size_t>(grid.sites()));
    for (int a = 0; a < grid.sites(); ++a) row[static_cast<std::size_t>(a)] = grid.shifted(a, dh, dw);
    src.push_back(std::move(row));
  }
  return src;
}

int NetworkSpec::pool_count() const {
  return (grid.height / pool_window) * (grid.width / pool_window);
}

std::vector<int> NetworkSpec::pool_assignment() const {
  std::vector<int> out(static_cast<std::size_t>(grid.sites()));
  const int per_row = grid.width / pool_window;
  for (int h = 0; h < grid.height; ++h)
    for (int w = 0; w < grid.width; ++w)
      out[static_cast<std::size_t>(grid.site(h, w))] = (h / pool_window) * per_row + w / pool_window;
  return out;
}

int NetworkSpec::readout_fan_in() const {
  switch (kind) {
    case ModelKind::FCN:
    case ModelKind::GAP: return width;
    case ModelKind::LCN:
    case ModelKind::VEC: return grid.sites() * width;
    case ModelKind::LAP: return pool_count() * width;
  }
  return width;
}

double NetworkSpec::sigma_w() const { return std::sqrt(sigma_w2); }
double NetworkSpec::sigma_b() const { return bias ? std::sqrt(sigma_b2) : 0.0; }

void to_json(nlohmann::json& j, const NetworkSpec& s) {
  j = {{"kind", s.name()},       {"depth", s.depth},       {"width", s.width},
       {"half_window", s.half_window}, {"pool_window", s.pool_window}, {"grid", s.grid},
       {"sigma_w2", s.sigma_w2}, {"sigma_b2", s.sigma_b2}, {"outputs", s.outputs},
       {"bias", s.bias}};
}

void from_json(const nlohmann::json& j, NetworkSpec& s) {
  NetworkSpec d;
  d.depth = j.value("depth", d.depth);
  d.width = j.value("width", d.width);
  d.half_window = j.value("half_window", d.half_window);
  d.pool_window = j.value("pool_window", d.pool_window);
  d.grid = j.value("grid", d.grid);
  d.sigma_w2 = j.value("sigma_w2", d.sigma_w2);
  d.sigma_b2 = j.value("sigma_b2", d.sigma_b2);
  d.outputs = j.value("outputs", d.outputs);
  d.bias = j.value("bias", d.bias);
  s = with_model_name(d, j.value("kind", std::string("FCN")));
}

}  // namespace symsys
