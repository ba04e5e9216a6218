#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dunkl/halfline.hpp"
#include "dunkl/hermite.hpp"
#include "dunkl/norms.hpp"
#include "dunkl/quadrature.hpp"

namespace dunkl::io {

/// File-system and parse failures (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g; non-finite values print as nan/inf/-inf.
std::string fmt(double v);

/// JSON text with every floating-point number at 17 significant digits
/// (non-finite numbers become null).
std::string dump(const nlohmann::json& j, int indent = 2);

nlohmann::json to_json(const CoeffVector<double>& c);
/// Parses {"sigma", "s", "parity", "coeffs"}; "parity" may be "even", "odd",
/// "mixed" or absent.
CoeffVector<double> coeffs_from_json(const nlohmann::json& j);
CoeffVector<double> coeffs_from_json_text(const std::string& text);

/// k,c_k
std::string coeffs_to_csv(const CoeffVector<double>& c);

/// Reads "x,f" rows (header row optional, '#' comments and blank lines
/// skipped). Errors name the source and the 1-based line number.
GridFunction<double> parse_grid_csv(std::istream& in, const std::string& source = "<input>");
GridFunction<double> read_grid_csv(const std::string& path);

/// Two-column CSV with the given header.
std::string columns_to_csv(const std::string& h1, const std::string& h2, const std::vector<double>& a,
                           const std::vector<double>& b);

nlohmann::json to_json(const EmbeddingReport& r);
std::string decay_to_csv(const std::vector<DecayRow>& rows);
nlohmann::json to_json(const std::vector<ExtensionRoot<double>>& roots);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace dunkl::io
