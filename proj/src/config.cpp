#include "pevp/config.hpp"

#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "pevp/error.hpp"
#include "pevp/expr.hpp"

namespace pevp {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::Config, "problem config: " + what);
}

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Expr expr;
};

Expr parse_entry(const std::string& text, Eigen::Index row, Eigen::Index col) {
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    schema_error("entry (" + std::to_string(row + 1) + "," + std::to_string(col + 1) + "): " +
                 e.what());
  }
}

ParameterDomain read_domain(const json& config) {
  ParameterDomain domain;
  if (!config.contains("mu_domain")) return domain;
  const auto& d = config.at("mu_domain");
  if (d.is_string()) {
    if (d.get<std::string>() != "all") schema_error("mu_domain must be \"all\" or an object");
    return domain;
  }
  if (!d.is_object()) schema_error("mu_domain must be \"all\" or an object");
  if (d.contains("min")) domain.lo = d.at("min").get<double>();
  if (d.contains("max")) domain.hi = d.at("max").get<double>();
  if (d.contains("exclude")) domain.excluded = d.at("exclude").get<std::vector<double>>();
  if (!(domain.lo <= domain.hi)) schema_error("mu_domain min exceeds max");
  return domain;
}

std::vector<Entry> read_entries(const json& config, Eigen::Index n) {
  const bool dense = config.contains("dense");
  const bool sparse = config.contains("sparse");
  if (dense == sparse) schema_error("exactly one of \"dense\" or \"sparse\" is required");

  std::vector<Entry> entries;
  if (dense) {
    const auto& list = config.at("dense");
    if (!list.is_array() || static_cast<Eigen::Index>(list.size()) != n * n) {
      schema_error("dense listing must hold n*n = " + std::to_string(n * n) +
                   " expressions, got " + std::to_string(list.size()));
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto& item = list[static_cast<std::size_t>(r * n + c)];
        if (!item.is_string()) schema_error("dense entries must be expression strings");
        entries.push_back({r, c, parse_entry(item.get<std::string>(), r, c)});
      }
    }
    return entries;
  }

  for (const auto& item : config.at("sparse")) {
    if (!item.is_array() || item.size() != 3 || !item[2].is_string()) {
      schema_error("sparse entries must be [row, col, \"expr\"]");
    }
    const auto r = item[0].get<Eigen::Index>();
    const auto c = item[1].get<Eigen::Index>();
    if (r < 1 || r > n || c < 1 || c > n) {
      schema_error("sparse entry (" + std::to_string(r) + "," + std::to_string(c) +
                   ") outside 1.." + std::to_string(n));
    }
    entries.push_back({r - 1, c - 1, parse_entry(item[2].get<std::string>(), r - 1, c - 1)});
  }
  return entries;
}

}  // namespace

ParametricProblem problem_from_config(const json& config) {
  if (!config.is_object()) schema_error("top level must be an object");
  Eigen::Index n = 0;
  std::string name = "config";
  bool hermitian = false;
  ParameterDomain domain;
  std::vector<Entry> entries;
  try {
    if (!config.contains("n")) schema_error("missing field \"n\"");
    n = config.at("n").get<Eigen::Index>();
    if (n < 1) schema_error("n must be positive");
    name = config.value("name", name);
    hermitian = config.value("hermitian", false);
    domain = read_domain(config);
    entries = read_entries(config, n);
  } catch (const json::exception& e) {
    schema_error(e.what());
  }

  auto shared = std::make_shared<const std::vector<Entry>>(std::move(entries));
  auto eval = [shared, n](double mu) {
    CMatrix a = CMatrix::Zero(n, n);
    for (const auto& e : *shared) a(e.row, e.col) += evaluate(*e.expr, mu);
    return a;
  };
  auto derivs = [shared, n](double mu0, int order) {
    std::vector<CMatrix> out(static_cast<std::size_t>(order) + 1, CMatrix::Zero(n, n));
    for (const auto& e : *shared) {
      const auto d = taylor_arith_eval(*e.expr, mu0, order);
      for (std::size_t k = 0; k < d.size(); ++k) out[k](e.row, e.col) += d[k];
    }
    return out;
  };
  return ParametricProblem(name, n, hermitian, domain, eval, derivs);
}

ParametricProblem problem_from_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open problem config '" + path.string() + "'");
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "problem config '" + path.string() + "': " + e.what());
  }
  return problem_from_config(config);
}

}  // namespace pevp
