#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "dpfit/noise.hpp"

namespace dpfit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Shape = std::vector<Index>;

// Nonnegative cell counts (or weights) with a 1-D or 2-D shape. 2-D cells
// are stored row-major.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(Vector cells);
  Histogram(Vector cells, Shape shape);

  // Row-major copy of a dense matrix.
  static Histogram from_matrix(const Matrix& m);

  const Vector& cells() const { return cells_; }
  const Shape& shape() const { return shape_; }
  Index size() const { return cells_.size(); }
  int dims() const { return static_cast<int>(shape_.size()); }
  Index rows() const { return shape_[0]; }
  Index cols() const { return dims() == 2 ? shape_[1] : 1; }

  double operator[](Index i) const { return cells_[i]; }
  double operator()(Index r, Index c) const { return cells_[r * cols() + c]; }
  double total() const { return cells_.sum(); }

  Histogram reshaped(Shape shape) const { return Histogram(cells_, std::move(shape)); }

  friend bool operator==(const Histogram& a, const Histogram& b) {
    return a.shape_ == b.shape_ && a.cells_ == b.cells_;
  }

 private:
  Vector cells_;
  Shape shape_;
};

Index shape_size(const Shape& shape);
void validate_shape(const Shape& shape);

// A 0/1 indicator over histogram cells.
class CountingQuery {
 public:
  CountingQuery(std::string id, Vector indicator);
  // Indicator with ones at the given cells.
  static CountingQuery over_cells(std::string id, Index size,
                                  const std::vector<Index>& cells);

  const std::string& id() const { return id_; }
  const Vector& indicator() const { return indicator_; }
  Index size() const { return indicator_.size(); }

 private:
  std::string id_;
  Vector indicator_;
};

double evaluate(const CountingQuery& query, const Histogram& h);
double evaluate(const CountingQuery& query, const Vector& x);

// Pairwise-disjoint queries sharing one noise distribution.
struct QueryGroup {
  std::string name;
  std::vector<CountingQuery> queries;
  std::optional<NoiseSpec> noise;
};

// Ordered query groups over one histogram shape. Group order doubles as the
// priority order for sequential fitting.
class Workload {
 public:
  Workload(Shape shape, std::vector<QueryGroup> groups);

  const Shape& shape() const { return shape_; }
  Index cells() const { return shape_size(shape_); }
  const std::vector<QueryGroup>& groups() const { return groups_; }
  std::size_t group_count() const { return groups_.size(); }
  std::size_t query_count() const;

  // Index of the named group, or nullopt.
  std::optional<std::size_t> find_group(const std::string& name) const;
  bool calibrated() const;

  // Copy with one noise spec per group.
  Workload with_noise(const std::vector<NoiseSpec>& specs) const;

  // All indicators stacked as rows, in group order.
  Matrix query_matrix() const;

 private:
  Shape shape_;
  std::vector<QueryGroup> groups_;
};

// [sum, identity] over d cells.
Workload make_workload_1d(Index cells);
// [sum, identity, marg1, marg2] over a rows x cols grid. marg1 has one query
// per row (summing across columns), marg2 one per column.
Workload make_workload_2d(Index rows, Index cols);
// Dispatches on the histogram shape.
Workload make_default_workload(const Shape& shape);
// Identity group only.
Workload make_identity_workload(const Shape& shape);

double l1_sensitivity(const Workload& w);
double l2_sensitivity(const Workload& w);

}  // namespace dpfit
