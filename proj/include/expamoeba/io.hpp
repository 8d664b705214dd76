#pragma once

#include "expamoeba/amoeba.hpp"
#include "expamoeba/convexity.hpp"
#include "expamoeba/lattice.hpp"

#include <string>
#include <utility>
#include <vector>

namespace expamoeba {

inline constexpr const char* kFormatVersion = "expamoeba/1";

struct ParsedSystem {
  ExpSystem system;
  GeneratorCheck check;
};

/// JSON system description. Duplicate exponent vectors are merged by adding
/// coefficients; exact-zero results are dropped; a sum left empty is an error.
/// Generators are validated; a relation raises DependentGenerators.
ParsedSystem parse_system_text(const std::string& text, RelationSearch bounds = {});
ParsedSystem parse_system_file(const std::string& path, RelationSearch bounds = {});
std::string serialize_system(const ExpSystem& F);

/// Grayscale P2 with values mapped to 0..65535 by `scale` (recorded in a
/// comment). 3-D rasters stack their axis-0 slices vertically.
std::string raster_pgm(const Raster& r);
/// Header x0[,x1,x2],defect,centre_defect,mask; one row per cell.
std::string raster_csv(const Raster& r);

std::string mask_text(const Mask& X);
Mask parse_mask_text(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

/// Ordered key=value lines.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, std::size_t value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// %.17g
std::string format_double(double v);
std::string format_vector(const Eigen::VectorXd& v);
std::string format_complex(Complex c);

}  // namespace expamoeba
