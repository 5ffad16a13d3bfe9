#pragma once

#include <string>
#include <vector>

namespace dpfit {

struct ReportRow {
  std::string dataset;
  std::string mechanism;
  std::string budget;
  std::string algorithm;
  std::string query_group;
  std::string metric;  // "Total" or "Max"
  double value = 0.0;
  double stderr_ = 0.0;
  int trials_used = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

enum class TableFormat { kCsv, kMarkdown };

TableFormat parse_table_format(const std::string& name);

// CSV: a header plus one line per row, doubles in shortest round-trip form.
// Markdown: one block per (mechanism, budget, group, metric), datasets as
// rows and algorithms as columns, cells "value ± stderr".
std::string emit_table(const std::vector<ReportRow>& rows, TableFormat format);

// Inverse of the CSV form of emit_table. Throws ConfigError on bad input.
std::vector<ReportRow> parse_csv(const std::string& text);

}  // namespace dpfit
