#include "symsys/data/dataset.hpp"
#include "symsys/mathcore/container.hpp"

namespace symsys {
namespace {

NamedArray to_array(const std::string& name, const RowMatrix& m) {
  NamedArray a{name, {m.rows(), m.cols()}, std::vector<double>(m.data(), m.data() + m.size())};
  return a;
}

RowMatrix from_array(const NamedArray& a) {
  if (a.shape.size() != 2) throw std::runtime_error("dataset: array '" + a.name + "' is not 2-D");
  RowMatrix m(a.shape[0], a.shape[1]);
  std::copy(a.values.begin(), a.values.end(), m.data());
  return m;
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds) {
  ds.validate();
  Container c;
  c.header = {{"kind", "dataset"},
              {"grid", ds.grid()},
              {"m_train", ds.train.size()},
              {"m_test", ds.test.size()},
              {"classes", ds.classes()},
              {"provenance", ds.provenance}};
  c.arrays = {to_array("train_x", ds.train.x.values), to_array("train_y", ds.train.y.values),
              to_array("test_x", ds.test.x.values), to_array("test_y", ds.test.y.values)};
  write_container(path, c);
}

Dataset read_dataset(const std::string& path) {
  const Container c = read_container(path);
  if (c.header.value("kind", "") != "dataset") throw std::runtime_error("read_dataset: " + path + " is not a dataset");
  const auto grid = c.header.at("grid").get<SpatialGrid>();
  Dataset ds;
  ds.train = {ImageBatch(grid, from_array(c.array("train_x"))), LabelBatch{from_array(c.array("train_y"))}};
  ds.test = {ImageBatch(grid, from_array(c.array("test_x"))), LabelBatch{from_array(c.array("test_y"))}};
  ds.provenance = c.header.at("provenance").get<Provenance>();
  ds.validate();
  return ds;
}

}  // namespace symsys
