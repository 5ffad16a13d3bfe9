#include "dpfit/benchdata.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"

namespace dpfit {
namespace {

std::string two_digits(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", k);
  return buf;
}

}  // namespace

DatasetSpec DatasetSpec::level(int k, int dims) {
  DatasetSpec s;
  s.family = DatasetFamily::kLevel;
  s.k = k;
  s.dims = dims;
  return s;
}

DatasetSpec DatasetSpec::stair(int dims) {
  DatasetSpec s;
  s.family = DatasetFamily::kStair;
  s.dims = dims;
  return s;
}

DatasetSpec DatasetSpec::step(int k, int dims) {
  DatasetSpec s;
  s.family = DatasetFamily::kStep;
  s.k = k;
  s.dims = dims;
  return s;
}

DatasetSpec DatasetSpec::split_stairs(int dims) {
  DatasetSpec s;
  s.family = DatasetFamily::kSplitStairs;
  s.dims = dims;
  return s;
}

DatasetSpec DatasetSpec::difficult(Index d, double eps) {
  DatasetSpec s;
  s.family = DatasetFamily::kDifficult;
  s.d = d;
  s.eps = eps;
  return s;
}

DatasetSpec DatasetSpec::file(std::string path, Shape shape) {
  DatasetSpec s;
  s.family = DatasetFamily::kFile;
  s.path = std::move(path);
  s.shape = std::move(shape);
  s.dims = static_cast<int>(s.shape.size());
  return s;
}

void DatasetSpec::validate() const {
  switch (family) {
    case DatasetFamily::kLevel:
    case DatasetFamily::kStep:
      if (k < 0) throw InvalidArgument("dataset k must be nonnegative");
      [[fallthrough]];
    case DatasetFamily::kStair:
    case DatasetFamily::kSplitStairs:
      if (dims != 1 && dims != 2) throw InvalidArgument("dataset dims must be 1 or 2");
      break;
    case DatasetFamily::kDifficult:
      if (d < 2) throw InvalidArgument("difficult dataset needs d >= 2");
      if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("difficult dataset needs eps > 0");
      break;
    case DatasetFamily::kFile:
      if (path.empty()) throw InvalidArgument("file dataset needs a path");
      validate_shape(shape);
      break;
  }
}

std::string DatasetSpec::name() const {
  const std::string suffix = "-" + std::to_string(dims) + "d";
  switch (family) {
    case DatasetFamily::kLevel: return "Level" + two_digits(k) + suffix;
    case DatasetFamily::kStair: return "Stair" + suffix;
    case DatasetFamily::kStep: return "Step" + two_digits(k) + suffix;
    case DatasetFamily::kSplitStairs: return "SplitStairs" + suffix;
    case DatasetFamily::kDifficult:
      return "Difficult-d" + std::to_string(d) + "-eps" + format_double(eps);
    case DatasetFamily::kFile: return std::filesystem::path(path).stem().string();
  }
  return "?";
}

DatasetFamily parse_family(const std::string& name) {
  for (auto f : {DatasetFamily::kLevel, DatasetFamily::kStair, DatasetFamily::kStep,
                 DatasetFamily::kSplitStairs, DatasetFamily::kDifficult, DatasetFamily::kFile})
    if (family_name(f) == name) return f;
  throw InvalidArgument("unknown dataset family: " + name);
}

std::string family_name(DatasetFamily f) {
  switch (f) {
    case DatasetFamily::kLevel: return "level";
    case DatasetFamily::kStair: return "stair";
    case DatasetFamily::kStep: return "step";
    case DatasetFamily::kSplitStairs: return "splitstairs";
    case DatasetFamily::kDifficult: return "difficult";
    case DatasetFamily::kFile: return "file";
  }
  return "?";
}

DatasetSpec parse_dataset_name(const std::string& name) {
  static const std::regex re(
      R"((Level|Step)(\d+)-([12])d|(Stair|SplitStairs)-([12])d|Difficult-d(\d+)-eps(\S+))");
  std::smatch m;
  if (!std::regex_match(name, m, re)) throw InvalidArgument("unknown dataset name: " + name);
  if (m[6].matched) {
    double eps = 0;
    if (!parse_double(m[7].str(), eps)) throw InvalidArgument("bad epsilon in dataset name: " + name);
    return DatasetSpec::difficult(std::stoll(m[6]), eps);
  }
  if (m[1].matched) {
    const int k = std::stoi(m[2]);
    const int dims = std::stoi(m[3]);
    return m[1] == "Level" ? DatasetSpec::level(k, dims) : DatasetSpec::step(k, dims);
  }
  const int dims = std::stoi(m[5]);
  return m[4] == "Stair" ? DatasetSpec::stair(dims) : DatasetSpec::split_stairs(dims);
}

Histogram generate(const DatasetSpec& spec) {
  spec.validate();
  if (spec.family == DatasetFamily::kDifficult) return generate_difficult(spec.d, spec.eps);
  if (spec.family == DatasetFamily::kFile) return load_histogram_file(spec.path, spec.shape);

  Vector cells = Vector::Zero(kSyntheticCells);
  for (Index i = 1; i < kSyntheticCells; ++i) {
    switch (spec.family) {
      case DatasetFamily::kLevel: cells[i] = spec.k; break;
      case DatasetFamily::kStair: cells[i] = static_cast<double>(i); break;
      case DatasetFamily::kStep: cells[i] = i < kSyntheticCells / 2 ? 0.0 : spec.k; break;
      case DatasetFamily::kSplitStairs: cells[i] = i < kSyntheticCells / 2 ? static_cast<double>(i) : 0.0; break;
      default: break;
    }
  }
  cells[0] = kFirstCell;
  if (spec.dims == 2) return Histogram(std::move(cells), Shape{10, 10});
  return Histogram(std::move(cells));
}

Histogram generate_difficult(Index d, double eps) {
  if (d < 2) throw InvalidArgument("difficult dataset needs d >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("difficult dataset needs eps > 0");
  Vector cells = Vector::Zero(d);
  cells[0] = std::max(1.0, std::round(std::log(static_cast<double>(d)) / eps));
  return Histogram(std::move(cells));
}

Histogram load_histogram_file(const std::string& path, const Shape& shape) {
  validate_shape(shape);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open histogram file: " + path);
  const Index rows = shape.size() == 2 ? shape[0] : 1;
  const Index cols = shape.size() == 2 ? shape[1] : shape[0];

  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(rows * cols));
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw MalformedRowError("empty row " + std::to_string(row), row, 0);
    }
    if (row > rows)
      throw ShapeMismatchError("file has more than " + std::to_string(rows) + " rows", row, 0);
    std::stringstream fields(line);
    std::string field;
    int col = 0;
    while (std::getline(fields, field, ',')) {
      ++col;
      long long v = 0;
      if (!parse_int(field, v))
        throw MalformedRowError("bad count '" + field + "' at row " + std::to_string(row) +
                                    ", column " + std::to_string(col),
                                row, col);
      if (v < 0)
        throw NegativeCountError("negative count at row " + std::to_string(row) + ", column " +
                                     std::to_string(col),
                                 row, col);
      cells.push_back(static_cast<double>(v));
    }
    if (line.back() == ',')
      throw MalformedRowError("trailing comma at row " + std::to_string(row), row, col + 1);
    if (col != cols)
      throw ShapeMismatchError("row " + std::to_string(row) + " has " + std::to_string(col) +
                                   " columns, expected " + std::to_string(cols),
                               row, 0);
  }
  if (row < rows && static_cast<Index>(cells.size()) != rows * cols)
    throw ShapeMismatchError("file has " + std::to_string(row) + " rows, expected " +
                                 std::to_string(rows),
                             0, 0);
  return Histogram(Eigen::Map<const Vector>(cells.data(), static_cast<Index>(cells.size())), shape);
}

void write_histogram_file(const std::string& path, const Histogram& h) {
  for (Index i = 0; i < h.size(); ++i)
    if (h[i] != std::round(h[i]) || std::abs(h[i]) > 9.0e15)
      throw InvalidArgument("histogram files hold integer counts only");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write histogram file: " + path);
  const Index rows = h.dims() == 2 ? h.rows() : 1;
  const Index cols = h.dims() == 2 ? h.cols() : h.size();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << static_cast<long long>(h[r * cols + c]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing histogram file: " + path);
}

}  // namespace dpfit
