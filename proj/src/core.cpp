#include "dpfit/core.hpp"

#include <set>
#include <utility>

#include "dpfit/error.hpp"

namespace dpfit {

Index shape_size(const Shape& shape) {
  Index n = 1;
  for (Index d : shape) n *= d;
  return n;
}

void validate_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 2)
    throw DimensionError("histogram shape must have 1 or 2 dimensions");
  for (Index d : shape)
    if (d < 1) throw DimensionError("histogram dimensions must be positive");
}

Histogram::Histogram(Vector cells)
    : Histogram(cells, Shape{static_cast<Index>(cells.size())}) {}

Histogram::Histogram(Vector cells, Shape shape)
    : cells_(std::move(cells)), shape_(std::move(shape)) {
  validate_shape(shape_);
  if (shape_size(shape_) != cells_.size())
    throw DimensionError("histogram shape does not match cell count");
  for (Index i = 0; i < cells_.size(); ++i) {
    if (!(cells_[i] >= 0.0) || !std::isfinite(cells_[i]))
      throw InvalidArgument("histogram cell " + std::to_string(i) +
                            " is negative or not finite");
  }
}

Histogram Histogram::from_matrix(const Matrix& m) {
  Vector cells(m.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) cells[r * m.cols() + c] = m(r, c);
  return Histogram(std::move(cells), Shape{m.rows(), m.cols()});
}

CountingQuery::CountingQuery(std::string id, Vector indicator)
    : id_(std::move(id)), indicator_(std::move(indicator)) {
  for (Index i = 0; i < indicator_.size(); ++i) {
    if (indicator_[i] != 0.0 && indicator_[i] != 1.0)
      throw InvalidArgument("query " + id_ + " has a non-binary indicator");
  }
}

CountingQuery CountingQuery::over_cells(std::string id, Index size,
                                        const std::vector<Index>& cells) {
  Vector ind = Vector::Zero(size);
  for (Index c : cells) {
    if (c < 0 || c >= size) throw DimensionError("query cell out of range");
    ind[c] = 1.0;
  }
  return CountingQuery(std::move(id), std::move(ind));
}

double evaluate(const CountingQuery& query, const Vector& x) {
  if (query.size() != x.size())
    throw DimensionError("query " + query.id() + " has " +
                         std::to_string(query.size()) + " cells, data has " +
                         std::to_string(x.size()));
  return query.indicator().dot(x);
}

double evaluate(const CountingQuery& query, const Histogram& h) {
  return evaluate(query, h.cells());
}

Workload::Workload(Shape shape, std::vector<QueryGroup> groups)
    : shape_(std::move(shape)), groups_(std::move(groups)) {
  validate_shape(shape_);
  const Index n = cells();
  std::set<std::string> names;
  for (const auto& g : groups_) {
    if (!names.insert(g.name).second)
      throw InvalidArgument("duplicate query group name: " + g.name);
    if (g.queries.empty())
      throw InvalidArgument("query group " + g.name + " is empty");
    Vector cover = Vector::Zero(n);
    for (const auto& q : g.queries) {
      if (q.size() != n)
        throw DimensionError("query " + q.id() + " does not match workload shape");
      cover += q.indicator();
    }
    if (cover.maxCoeff() > 1.0)
      throw InvalidArgument("queries in group " + g.name + " overlap");
    if (g.noise && g.noise->variance() < 0.0)
      throw InvalidArgument("negative noise variance");
  }
}

std::size_t Workload::query_count() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.queries.size();
  return n;
}

std::optional<std::size_t> Workload::find_group(const std::string& name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i].name == name) return i;
  return std::nullopt;
}

bool Workload::calibrated() const {
  for (const auto& g : groups_)
    if (!g.noise) return false;
  return true;
}

Workload Workload::with_noise(const std::vector<NoiseSpec>& specs) const {
  if (specs.size() != groups_.size())
    throw InvalidArgument("need one noise spec per query group");
  auto groups = groups_;
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].noise = specs[i];
  return Workload(shape_, std::move(groups));
}

Matrix Workload::query_matrix() const {
  Matrix a(static_cast<Index>(query_count()), cells());
  Index row = 0;
  for (const auto& g : groups_)
    for (const auto& q : g.queries) a.row(row++) = q.indicator().transpose();
  return a;
}

namespace {

QueryGroup sum_group(Index n) {
  return {"sum", {CountingQuery("sum", Vector::Ones(n))}, std::nullopt};
}

QueryGroup identity_group(Index n) {
  QueryGroup g{"identity", {}, std::nullopt};
  g.queries.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    g.queries.push_back(
        CountingQuery::over_cells("id[" + std::to_string(i) + "]", n, {i}));
  return g;
}

}  // namespace

Workload make_workload_1d(Index cells) {
  return Workload({cells}, {sum_group(cells), identity_group(cells)});
}

Workload make_workload_2d(Index rows, Index cols) {
  const Index n = rows * cols;
  QueryGroup marg1{"marg1", {}, std::nullopt};
  for (Index r = 0; r < rows; ++r) {
    std::vector<Index> cells;
    for (Index c = 0; c < cols; ++c) cells.push_back(r * cols + c);
    marg1.queries.push_back(
        CountingQuery::over_cells("marg1[" + std::to_string(r) + "]", n, cells));
  }
  QueryGroup marg2{"marg2", {}, std::nullopt};
  for (Index c = 0; c < cols; ++c) {
    std::vector<Index> cells;
    for (Index r = 0; r < rows; ++r) cells.push_back(r * cols + c);
    marg2.queries.push_back(
        CountingQuery::over_cells("marg2[" + std::to_string(c) + "]", n, cells));
  }
  return Workload({rows, cols}, {sum_group(n), identity_group(n),
                                 std::move(marg1), std::move(marg2)});
}

Workload make_default_workload(const Shape& shape) {
  validate_shape(shape);
  if (shape.size() == 1) return make_workload_1d(shape[0]);
  return make_workload_2d(shape[0], shape[1]);
}

Workload make_identity_workload(const Shape& shape) {
  validate_shape(shape);
  return Workload(shape, {identity_group(shape_size(shape))});
}

double l1_sensitivity(const Workload& w) {
  if (w.query_count() == 0) throw InvalidArgument("empty workload");
  return w.query_matrix().cwiseAbs().colwise().sum().maxCoeff();
}

double l2_sensitivity(const Workload& w) {
  if (w.query_count() == 0) throw InvalidArgument("empty workload");
  return w.query_matrix().colwise().norm().maxCoeff();
}

}  // namespace dpfit
