#include "dpfit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"

namespace dpfit {
namespace {

const std::vector<std::string> kColumns = {"dataset",     "mechanism", "budget",
                                           "algorithm",   "query_group", "metric",
                                           "value",       "stderr",    "trials_used"};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// RFC 4180 records; quoted fields may hold commas, quotes and newlines.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw ConfigError("stray quote in csv field");
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ConfigError("unterminated quoted csv field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::string md_cell(double value, double err) {
  if (std::isnan(value)) return "n/a";
  char buf[96];
  if (std::isnan(err)) std::snprintf(buf, sizeof(buf), "%.2f", value);
  else std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", value, err);
  return buf;
}

template <typename T>
void add_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string emit_markdown(const std::vector<ReportRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Key> blocks;
  for (const auto& r : rows) add_unique(blocks, Key{r.mechanism, r.budget, r.query_group, r.metric});

  std::ostringstream out;
  for (const auto& [mechanism, budget, group, metric] : blocks) {
    std::vector<std::string> datasets;
    std::vector<std::string> algorithms;
    std::map<std::pair<std::string, std::string>, const ReportRow*> cells;
    for (const auto& r : rows) {
      if (r.mechanism != mechanism || r.budget != budget || r.query_group != group || r.metric != metric)
        continue;
      add_unique(datasets, r.dataset);
      add_unique(algorithms, r.algorithm);
      cells[{r.dataset, r.algorithm}] = &r;
    }
    if (out.tellp() > 0) out << "\n";
    out << "### " << group << " " << metric << ", " << mechanism << " (" << budget << ")\n\n";
    out << "| Dataset |";
    for (const auto& a : algorithms) out << " " << a << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < algorithms.size(); ++i) out << "---:|";
    out << "\n";
    for (const auto& d : datasets) {
      out << "| " << d << " |";
      for (const auto& a : algorithms) {
        const auto it = cells.find({d, a});
        out << " " << (it == cells.end() ? "" : md_cell(it->second->value, it->second->stderr_)) << " |";
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "md") return TableFormat::kMarkdown;
  throw ConfigError("format must be csv or md");
}

std::string emit_table(const std::vector<ReportRow>& rows, TableFormat format) {
  if (format == TableFormat::kMarkdown) return emit_markdown(rows);
  std::ostringstream out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  out << "\n";
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << csv_field(r.mechanism) << ',' << csv_field(r.budget) << ','
        << csv_field(r.algorithm) << ',' << csv_field(r.query_group) << ',' << csv_field(r.metric)
        << ',' << format_double(r.value) << ',' << format_double(r.stderr_) << ',' << r.trials_used
        << "\n";
  }
  return out.str();
}

std::vector<ReportRow> parse_csv(const std::string& text) {
  const auto records = split_records(text);
  if (records.empty() || records.front() != kColumns) throw ConfigError("csv header does not match");
  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    const std::string where = "csv record " + std::to_string(i + 1);
    if (f.size() != kColumns.size()) throw ConfigError(where + ": expected 9 fields");
    ReportRow r{f[0], f[1], f[2], f[3], f[4], f[5]};
    if (!parse_double(f[6], r.value)) throw ConfigError(where + ": bad value");
    if (!parse_double(f[7], r.stderr_)) throw ConfigError(where + ": bad stderr");
    if (!parse_int(f[8], r.trials_used)) throw ConfigError(where + ": bad trials_used");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dpfit
