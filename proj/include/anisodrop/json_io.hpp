#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisodrop/energy.hpp"
#include "anisodrop/shapes.hpp"

namespace anisodrop {

using Json = nlohmann::json;  // std::map-backed objects: keys stay sorted

Json tension_to_json(const SurfaceTension& f);
SurfaceTension tension_from_json(const Json& j);

Json shape_to_json(const Shape& E);
Shape shape_from_json(const Json& j);

Json wulff_to_json(const WulffShape& K);
std::string wulff_boundary_csv(const WulffShape& K, const std::string& header);

Json breakdown_to_json(const EnergyBreakdown& b);

Json params_to_json(const EnergyParams& p);
EnergyParams params_from_json(const Json& j);

Json quadrature_to_json(const QuadratureSpec& s);
QuadratureSpec quadrature_from_json(const Json& j);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double x);

/// RFC-4180 style table: comma separator, '.' decimal point, CRLF rows.
/// The first line is a '#' comment embedding the config hash, then the
/// header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}
  void add_row(const std::vector<std::string>& cells);
  void add_row_doubles(const std::vector<double>& cells);
  std::string to_string(const std::string& comment) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

/// Fails with std::invalid_argument naming the offending field when `j`
/// contains a key outside `allowed`.
void reject_unknown_fields(const Json& j, const std::vector<std::string>& allowed,
                           const std::string& where);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace anisodrop
