#include "dunkl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dunkl::io {

namespace {

using nlohmann::json;

std::string quote(const std::string& s) {
  // nlohmann already knows how to escape strings
  return json(s).dump();
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + quote(it.key()) + (indent > 0 ? ": " : ":");
        dump_into(out, it.value(), indent, depth + 1);
      }
      out += nl + pad_close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump_into(out, e, indent, depth + 1);
      }
      if (!flat) out += nl + pad_close;
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

double parse_number(const std::string& field, const std::string& source, std::size_t line, const char* what) {
  std::size_t b = field.find_first_not_of(" \t\r");
  std::size_t e = field.find_last_not_of(" \t\r");
  if (b == std::string::npos)
    throw IoError(source + ":" + std::to_string(line) + ": empty " + what + " field");
  const std::string t = field.substr(b, e - b + 1);
  double v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    throw IoError(source + ":" + std::to_string(line) + ": cannot parse " + what + " '" + t + "'");
  return v;
}

bool looks_numeric(const std::string& field) {
  const std::size_t b = field.find_first_not_of(" \t\r");
  if (b == std::string::npos) return false;
  const char c = field[b];
  return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const nlohmann::json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

nlohmann::json to_json(const CoeffVector<double>& c) {
  json j;
  j["sigma"] = c.params.sigma();
  j["s"] = c.params.s();
  j["parity"] = to_string(c.parity);
  j["coeffs"] = std::vector<double>(c.coeffs.data(), c.coeffs.data() + c.coeffs.size());
  if (c.truncation_warning) j["truncation_warning"] = true;
  return j;
}

CoeffVector<double> coeffs_from_json(const nlohmann::json& j) {
  try {
    const double sigma = j.at("sigma").get<double>();
    const double s = j.at("s").get<double>();
    const auto v = j.at("coeffs").get<std::vector<double>>();
    std::optional<Parity> par;
    if (j.contains("parity") && !j["parity"].is_null()) par = parse_parity(j["parity"].get<std::string>());
    Vector<double> c = Eigen::Map<const Vector<double>>(v.data(), static_cast<Eigen::Index>(v.size()));
    CoeffVector<double> out(std::move(c), SigmaParams<double>(sigma, s), par);
    if (par) {
      for (std::size_t k = 0; k < v.size(); ++k)
        if (parity_of(k) != *par && v[k] != 0)
          throw ValidationError("coefficient file: parity '" + std::string(to_string(par)) +
                                "' but c_" + std::to_string(k) + " is nonzero");
    }
    if (j.contains("truncation_warning")) out.truncation_warning = j["truncation_warning"].get<bool>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("coefficient JSON: ") + e.what());
  }
}

CoeffVector<double> coeffs_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("coefficient JSON: ") + e.what());
  }
  return coeffs_from_json(j);
}

std::string coeffs_to_csv(const CoeffVector<double>& c) {
  std::string out = "k,c_k\n";
  for (Eigen::Index k = 0; k < c.coeffs.size(); ++k) out += std::to_string(k) + "," + fmt(c.coeffs(k)) + "\n";
  return out;
}

GridFunction<double> parse_grid_csv(std::istream& in, const std::string& source) {
  std::vector<std::pair<double, double>> rows;
  std::vector<std::size_t> row_line;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(source + ":" + std::to_string(lineno) + ": expected two comma-separated columns");
    std::string f1 = line.substr(0, comma);
    std::string f2 = line.substr(comma + 1);
    if (f2.find(',') != std::string::npos)
      throw IoError(source + ":" + std::to_string(lineno) + ": expected two columns, found more");
    if (header_allowed && !looks_numeric(f1)) {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    rows.emplace_back(parse_number(f1, source, lineno, "x"), parse_number(f2, source, lineno, "value"));
    row_line.push_back(lineno);
  }
  if (rows.empty()) throw IoError(source + ": no data rows");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].first < rows[b].first; });
  GridFunction<double> g;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = rows[order[i]];
    if (i > 0 && r.first == g.nodes.back())
      throw IoError(source + ":" + std::to_string(row_line[order[i]]) + ": duplicate node x = " + fmt(r.first));
    g.nodes.push_back(r.first);
    g.values.push_back(r.second);
  }
  return g;
}

GridFunction<double> read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_grid_csv(in, path);
}

std::string columns_to_csv(const std::string& h1, const std::string& h2, const std::vector<double>& a,
                           const std::vector<double>& b) {
  std::string out = h1 + "," + h2 + "\n";
  for (std::size_t i = 0; i < a.size(); ++i) out += fmt(a[i]) + "," + fmt(b[i]) + "\n";
  return out;
}

nlohmann::json to_json(const EmbeddingReport& r) {
  auto spec = [](const SeminormSpec& sp) {
    return json{{"family", to_string(sp.family)}, {"m", sp.m}, {"parity", to_string(sp.parity)}};
  };
  return json{{"from", spec(r.spec_from)},
              {"to", spec(r.spec_to)},
              {"rule", r.rule},
              {"sigma", r.sigma},
              {"s", r.s},
              {"seed", r.seed},
              {"samples", r.samples},
              {"truncation", r.truncation},
              {"empirical_constant", r.empirical_constant},
              {"mean_ratio", r.mean_ratio},
              {"violations", r.violations}};
}

std::string decay_to_csv(const std::vector<DecayRow>& rows) {
  std::string out = "k,sup,normalized,region,inner_sup_phi_sq\n";
  for (const auto& r : rows)
    out += std::to_string(r.k) + "," + fmt(r.sup_xi_sq) + "," + fmt(r.normalized) + "," +
           (r.region == DecayRegion::whole_line ? "whole_line" : "outside_unit") + "," +
           fmt(r.inner_sup_phi_sq) + "\n";
  return out;
}

nlohmann::json to_json(const std::vector<ExtensionRoot<double>>& roots) {
  json arr = json::array();
  for (const auto& r : roots) arr.push_back({{"a", r.a}, {"sigma", r.sigma}, {"admissible", r.admissible}});
  return arr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace dunkl::io
