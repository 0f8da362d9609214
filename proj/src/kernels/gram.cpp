#include "symsys/kernels/gram.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

#include <omp.h>

#include "symsys/mathcore/container.hpp"

namespace symsys {
namespace {

std::vector<KernelRecursion::Input> prepare_all(const KernelRecursion& rec, const ImageBatch& x, bool parallel,
                                                int threads) {
  std::vector<KernelRecursion::Input> out(static_cast<std::size_t>(x.size()));
#pragma omp parallel for schedule(static) num_threads(threads) if (parallel)
  for (Eigen::Index i = 0; i < x.size(); ++i) out[static_cast<std::size_t>(i)] = rec.prepare(x.values.row(i).data());
  return out;
}

}  // namespace

KernelMatrices kernel_matrices(const NetworkSpec& spec, const ImageBatch& x, const ImageBatch* y,
                               const GramOptions& options) {
  if (!(x.grid == spec.grid) || (y && !(y->grid == spec.grid)))
    throw std::invalid_argument("kernel: input grid does not match the architecture");
  if (options.tile < 1) throw std::invalid_argument("kernel: tile must be positive");
  const KernelRecursion rec(spec);
  const bool symmetric = y == nullptr;
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

  const auto px = prepare_all(rec, x, options.parallel, threads);
  const auto py = symmetric ? std::vector<KernelRecursion::Input>{} : prepare_all(rec, *y, options.parallel, threads);
  const auto& right = symmetric ? px : py;
  const Eigen::Index rows = x.size(), cols = symmetric ? x.size() : y->size();

  KernelMatrices out;
  out.nngp.values.resize(rows, cols);
  out.ntk.values.resize(rows, cols);

  const Eigen::Index t = options.tile;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> tiles;
  for (Eigen::Index i = 0; i < rows; i += t)
    for (Eigen::Index j = symmetric ? i : 0; j < cols; j += t) tiles.emplace_back(i, j);

#pragma omp parallel for schedule(dynamic) num_threads(threads) if (options.parallel)
  for (std::size_t n = 0; n < tiles.size(); ++n) {
    const auto [i0, j0] = tiles[n];
    for (Eigen::Index i = i0; i < std::min(i0 + t, rows); ++i)
      for (Eigen::Index j = symmetric ? std::max(j0, i) : j0; j < std::min(j0 + t, cols); ++j) {
        const PairValues v = rec.pair(px[static_cast<std::size_t>(i)], right[static_cast<std::size_t>(j)]);
        out.nngp.values(i, j) = v.nngp;
        out.ntk.values(i, j) = v.ntk;
        if (symmetric) {
          out.nngp.values(j, i) = v.nngp;
          out.ntk.values(j, i) = v.ntk;
        }
      }
  }

  for (KernelMatrix* k : {&out.nngp, &out.ntk}) {
    k->architecture = spec.name() + "_inf";
    k->grid = spec.grid;
    k->symmetric = symmetric;
  }
  out.nngp.flavor = KernelFlavor::NNGP;
  out.ntk.flavor = KernelFlavor::NTK;
  return out;
}

KernelMatrix fcn_kernel(const ImageBatch& x, const ImageBatch& y, const NetworkSpec& spec, KernelFlavor flavor) {
  if (x.values.cols() != y.values.cols()) throw std::invalid_argument("fcn_kernel: input dimensions differ");
  NetworkSpec s = spec;
  s.kind = ModelKind::FCN;
  return kernel_matrices(s, x, &y).get(flavor);
}

KernelMatrix conv_kernel(const ImageBatch& x, const ImageBatch& y, const NetworkSpec& spec, KernelFlavor flavor) {
  if (!spec.conv()) throw std::invalid_argument("conv_kernel: FCN has no pixel readout");
  return kernel_matrices(spec, x, &y).get(flavor);
}

void write_kernel(const std::string& path, const KernelMatrix& k) {
  Container c;
  c.header = {{"kind", "kernel"},
              {"flavor", to_string(k.flavor)},
              {"architecture", k.architecture},
              {"grid", k.grid},
              {"symmetric", k.symmetric},
              {"jitter", k.jitter}};
  const RowMatrix rm = k.values;
  c.arrays.push_back({"values", {rm.rows(), rm.cols()}, std::vector<double>(rm.data(), rm.data() + rm.size())});
  write_container(path, c);
}

KernelMatrix read_kernel(const std::string& path) {
  const Container c = read_container(path);
  if (c.header.value("kind", "") != "kernel") throw std::runtime_error("read_kernel: " + path + " is not a kernel matrix");
  KernelMatrix k;
  k.flavor = parse_kernel_flavor(c.header.at("flavor").get<std::string>());
  k.architecture = c.header.at("architecture").get<std::string>();
  k.grid = c.header.at("grid").get<SpatialGrid>();
  k.symmetric = c.header.value("symmetric", false);
  k.jitter = c.header.value("jitter", 0.0);
  const auto& a = c.array("values");
  k.values = Eigen::Map<const RowMatrix>(a.values.data(), a.shape.at(0), a.shape.at(1));
  return k;
}

}  // namespace symsys
