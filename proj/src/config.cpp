#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"
#include "dpfit/harness.hpp"

namespace dpfit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      if (!values_.emplace(key, value).second) throw ConfigError("duplicate key: " + key);
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  double real(const std::string& key, double fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    double out = 0.0;
    if (!parse_double(*v, out)) throw ConfigError(key + ": not a number: " + *v);
    return out;
  }

  double required_real(const std::string& key) {
    if (!values_.count(key)) throw ConfigError("missing key: " + key);
    return real(key, 0.0);
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    Int out = 0;
    if (!parse_int(*v, out)) throw ConfigError(key + ": not an integer: " + *v);
    return out;
  }

  void finish() const {
    if (!values_.empty()) throw ConfigError("unknown key: " + values_.begin()->first);
  }

 private:
  std::map<std::string, std::string> values_;
};

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, 'x')) {
    Index v = 0;
    if (!parse_int(trim(part), v)) throw ConfigError("dataset.shape: bad extent in " + text);
    shape.push_back(v);
  }
  return shape;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const std::string name = trim(part);
    const auto a = parse_algorithm(name);
    if (!a) throw ConfigError("unknown algorithm: " + name);
    for (Algorithm b : out)
      if (b == *a) throw ConfigError("algorithm listed twice: " + name);
    out.push_back(*a);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    dataset.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0, 1)");
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  try {
    solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  for (Algorithm a : algorithms)
    if (a == Algorithm::kClamp && budget.kind() == BudgetKind::kApprox && !noise_override)
      throw ConfigError("clamp supports pure and zcdp budgets only");
  const int dims = dataset.family == DatasetFamily::kFile
                       ? static_cast<int>(dataset.shape.size())
                       : (dataset.family == DatasetFamily::kDifficult ? 1 : dataset.dims);
  if ((workload == WorkloadKind::k2d) != (dims == 2))
    throw ConfigError("workload dimensionality does not match the dataset");
}

ExperimentConfig parse_config(const std::string& text) {
  KeyValues kv(text);
  ExperimentConfig c;

  const auto dataset = kv.take("dataset");
  if (!dataset) throw ConfigError("missing key: dataset");
  const int dims = kv.integer<int>("dataset.dims", 1);
  try {
    if (!dataset->empty() && std::isupper(static_cast<unsigned char>((*dataset)[0]))) {
      c.dataset = parse_dataset_name(*dataset);
    } else {
      switch (parse_family(*dataset)) {
        case DatasetFamily::kLevel: c.dataset = DatasetSpec::level(kv.integer<int>("dataset.k", 0), dims); break;
        case DatasetFamily::kStair: c.dataset = DatasetSpec::stair(dims); break;
        case DatasetFamily::kStep: c.dataset = DatasetSpec::step(kv.integer<int>("dataset.k", 0), dims); break;
        case DatasetFamily::kSplitStairs: c.dataset = DatasetSpec::split_stairs(dims); break;
        case DatasetFamily::kDifficult:
          c.dataset = DatasetSpec::difficult(kv.integer<Index>("dataset.d", 100), kv.real("dataset.eps", 1.0));
          break;
        case DatasetFamily::kFile: {
          const auto path = kv.take("dataset.path");
          const auto shape = kv.take("dataset.shape");
          if (!path || !shape) throw ConfigError("file dataset needs dataset.path and dataset.shape");
          c.dataset = DatasetSpec::file(*path, parse_shape(*shape));
          break;
        }
      }
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  const int data_dims = c.dataset.family == DatasetFamily::kFile
                            ? static_cast<int>(c.dataset.shape.size())
                            : (c.dataset.family == DatasetFamily::kDifficult ? 1 : c.dataset.dims);
  const std::string workload = kv.take("workload").value_or(data_dims == 2 ? "2d" : "1d");
  if (workload == "1d") c.workload = WorkloadKind::k1d;
  else if (workload == "2d") c.workload = WorkloadKind::k2d;
  else throw ConfigError("workload must be 1d or 2d");

  const std::string budget = kv.take("budget").value_or("pure");
  try {
    if (budget == "pure") c.budget = PrivacyBudget::pure(kv.required_real("budget.eps"));
    else if (budget == "zcdp") c.budget = PrivacyBudget::zcdp(kv.required_real("budget.rho"));
    else if (budget == "approx")
      c.budget = PrivacyBudget::approx(kv.required_real("budget.eps"), kv.required_real("budget.delta"));
    else throw ConfigError("budget must be pure, zcdp or approx");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  const auto algorithms = kv.take("algorithms");
  if (!algorithms) throw ConfigError("missing key: algorithms");
  c.algorithms = parse_algorithms(*algorithms);
  c.trials = kv.integer<int>("trials", 1000);
  c.seed = kv.integer<std::uint64_t>("seed", 0);
  c.gamma = kv.real("gamma", 0.99);
  c.solver.abs_tol = kv.real("solver.abs_tol", c.solver.abs_tol);
  c.solver.rel_tol = kv.real("solver.rel_tol", c.solver.rel_tol);
  c.solver.max_iters = kv.integer<int>("solver.max_iters", c.solver.max_iters);
  c.solver.eq_slack = kv.real("solver.eq_slack", c.solver.eq_slack);
  c.solver.linf_slack = kv.real("solver.linf_slack", c.solver.linf_slack);
  kv.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace dpfit
