#pragma once

#include <string>

#include "dpfit/core.hpp"

namespace dpfit {

enum class DatasetFamily { kLevel, kStair, kStep, kSplitStairs, kDifficult, kFile };

struct DatasetSpec {
  DatasetFamily family = DatasetFamily::kLevel;
  int k = 0;            // Level and Step
  int dims = 1;         // synthetic families
  double eps = 1.0;     // Difficult
  Index d = 100;        // Difficult
  std::string path;     // File
  Shape shape;          // File

  static DatasetSpec level(int k, int dims = 1);
  static DatasetSpec stair(int dims = 1);
  static DatasetSpec step(int k, int dims = 1);
  static DatasetSpec split_stairs(int dims = 1);
  static DatasetSpec difficult(Index d, double eps);
  static DatasetSpec file(std::string path, Shape shape);

  void validate() const;
  // "Level00-1d", "Step16-2d", "SplitStairs-1d", "Stair-2d",
  // "Difficult-d100-eps1", or the file stem.
  std::string name() const;
};

inline constexpr Index kSyntheticCells = 100;
inline constexpr double kFirstCell = 10000.0;

// Family names: level, stair, step, splitstairs, difficult, file.
DatasetFamily parse_family(const std::string& name);
std::string family_name(DatasetFamily f);

// Parses names produced by DatasetSpec::name() for the synthetic families.
DatasetSpec parse_dataset_name(const std::string& name);

Histogram generate(const DatasetSpec& spec);
// d cells: cell 0 holds round(ln d / eps) (at least 1), the rest are 0.
Histogram generate_difficult(Index d, double eps);

// Plain CSV of nonnegative integers, one histogram row per line. A 1-D shape
// is a single line.
Histogram load_histogram_file(const std::string& path, const Shape& shape);
void write_histogram_file(const std::string& path, const Histogram& h);

}  // namespace dpfit
