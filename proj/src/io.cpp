#include "expamoeba/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace expamoeba {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v(i));
  return s + ")";
}

std::string format_complex(Complex c) { return format_double(c.real()) + (c.imag() < 0 ? "" : "+") + format_double(c.imag()) + "i"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << data;
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid real number '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size() || !std::isfinite(v)) throw ParseError("invalid real number '" + s + "'");
  return v;
}

std::string entry_text(const json& e, const std::string& where) {
  if (e.is_string()) return e.get<std::string>();
  if (e.is_number_integer()) return std::to_string(e.get<long long>());
  if (e.is_number()) return format_double(e.get<double>());
  throw ParseError(where + ": generator entries must be strings or numbers");
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return 0.0;
  const json& v = obj.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>());
  throw ParseError(where + ": '" + key + "' must be a number");
}

}  // namespace

ParsedSystem parse_system_text(const std::string& text, RelationSearch bounds) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("system file must be a JSON object");
  if (!doc.contains("version") || doc["version"] != kFormatVersion)
    throw ParseError(std::string("unsupported or missing version (expected \"") + kFormatVersion + "\")");
  try {
    const int n = doc.at("ambient_dim").get<int>();
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode != "rational" && mode != "real") throw ParseError("mode must be \"rational\" or \"real\"");
    const json& gens = doc.at("generators");
    if (!gens.is_array() || gens.empty()) throw ParseError("generators must be a nonempty array of rows");
    const Eigen::Index r = static_cast<Eigen::Index>(gens.size());
    for (const json& row : gens)
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw DimensionError("every generator row needs ambient_dim = " + std::to_string(n) + " entries");
    GeneratorMatrix omega;
    if (mode == "rational") {
      RationalMatrix w(r, n);
      for (Eigen::Index i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = Rational::parse(entry_text(gens[i][j], "generators"));
      omega = GeneratorMatrix(w);
    } else {
      Eigen::MatrixXd w(r, n);
      for (Eigen::Index i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = parse_real(entry_text(gens[i][j], "generators"));
      omega = GeneratorMatrix(w);
    }
    const json& sums = doc.at("sums");
    if (!sums.is_array()) throw ParseError("sums must be an array");
    if (sums.empty()) throw Error("no sums");
    std::vector<ExpSum> out;
    for (std::size_t s = 0; s < sums.size(); ++s) {
      const json& js = sums[s];
      ExpSum f;
      f.name = js.contains("name") ? js["name"].get<std::string>() : "f" + std::to_string(s + 1);
      const std::string where = "sum '" + f.name + "'";
      std::vector<std::vector<long long>> order;
      std::map<std::vector<long long>, Complex> merged;
      for (const json& jt : js.at("terms")) {
        std::vector<long long> k = jt.at("k").get<std::vector<long long>>();
        if (static_cast<Eigen::Index>(k.size()) != r)
          throw DimensionError(where + ": exponent vector of length " + std::to_string(k.size()) +
                               ", expected " + std::to_string(r));
        Complex c(number(jt, "re", where), number(jt, "im", where));
        auto [it, fresh] = merged.emplace(k, c);
        if (fresh)
          order.push_back(k);
        else
          it->second += c;
      }
      for (const auto& k : order) {
        Complex c = merged[k];
        if (c == Complex(0.0, 0.0)) continue;
        IVector kv(r);
        for (Eigen::Index j = 0; j < r; ++j) kv(j) = k[j];
        f.terms.push_back({c, kv});
      }
      if (f.terms.empty()) throw Error(where + " is empty after merging duplicate exponents");
      out.push_back(std::move(f));
    }
    ParsedSystem ps{ExpSystem(omega, std::move(out)), {}};
    ps.check = validate_generators(omega, bounds);
    if (!ps.check.ok) require_independent(omega, bounds);
    return ps;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed system file: ") + e.what());
  }
}

ParsedSystem parse_system_file(const std::string& path, RelationSearch bounds) {
  return parse_system_text(read_file(path), bounds);
}

std::string serialize_system(const ExpSystem& F) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["ambient_dim"] = F.dim();
  doc["mode"] = to_string(F.mode());
  json gens = json::array();
  const GeneratorMatrix& g = F.generators();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < g.dim(); ++j)
      row.push_back(g.mode() == Mode::rational ? g.exact()(i, j).str() : format_double(g.values()(i, j)));
    gens.push_back(row);
  }
  doc["generators"] = gens;
  json sums = json::array();
  for (const ExpSum& f : F.sums()) {
    json terms = json::array();
    for (const ExpTerm& t : f.terms) {
      std::vector<long long> k(t.k.data(), t.k.data() + t.k.size());
      terms.push_back({{"re", t.c.real()}, {"im", t.c.imag()}, {"k", k}});
    }
    sums.push_back({{"name", f.name}, {"terms", terms}});
  }
  doc["sums"] = sums;
  return doc.dump(2) + "\n";
}

std::string raster_pgm(const Raster& r) {
  int width = r.resolution.back();
  std::size_t height = r.cell_count() / static_cast<std::size_t>(width);
  double scale = 0.0;
  for (double v : r.values)
    if (std::isfinite(v)) scale = std::max(scale, v);
  if (scale == 0.0) scale = 1.0;
  std::string s = "P2\n# expamoeba raster kind=" + r.kind + " scale=" + format_double(scale) +
                  " (pixel = round(65535 * value / scale); skipped cells = 65535)\n";
  s += std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  for (std::size_t row = 0; row < height; ++row) {
    for (int c = 0; c < width; ++c) {
      double v = r.values[row * width + c];
      long px = std::isfinite(v) ? std::lround(65535.0 * std::min(v, scale) / scale) : 65535;
      s += (c ? " " : "") + std::to_string(px);
    }
    s += "\n";
  }
  return s;
}

std::string raster_csv(const Raster& r) {
  std::string s;
  for (Eigen::Index i = 0; i < r.dim(); ++i) s += "x" + std::to_string(i) + ",";
  s += "defect,centre_defect,mask\n";
  for (std::size_t idx = 0; idx < r.cell_count(); ++idx) {
    Eigen::VectorXd c = r.centre(idx);
    for (Eigen::Index i = 0; i < c.size(); ++i) s += format_double(c(i)) + ",";
    double cv = idx < r.centre_values.size() ? r.centre_values[idx] : r.values[idx];
    s += format_double(r.values[idx]) + "," + format_double(cv) + "," + (r.mask[idx] ? "1" : "0") + "\n";
  }
  return s;
}

std::string mask_text(const Mask& X) {
  std::string s = "expamoeba-mask/1\ndims " + std::to_string(X.dim()) + "\nres";
  for (int r : X.resolution) s += " " + std::to_string(r);
  s += "\nlo";
  for (int i = 0; i < X.dim(); ++i) s += " " + format_double(X.box.lo(i));
  s += "\nhi";
  for (int i = 0; i < X.dim(); ++i) s += " " + format_double(X.box.hi(i));
  s += "\n";
  const int last = X.resolution.back();
  for (std::size_t i = 0; i < X.data.size(); ++i) {
    s += X.data[i] ? '1' : '0';
    if ((i + 1) % last == 0) s += '\n';
  }
  return s;
}

Mask parse_mask_text(const std::string& text) {
  std::istringstream in(text);
  std::string tag, key;
  int dims = 0;
  if (!(in >> tag) || tag != "expamoeba-mask/1") throw ParseError("not an expamoeba mask file");
  if (!(in >> key >> dims) || key != "dims" || dims < 1 || dims > 3) throw ParseError("mask: bad dims line");
  std::vector<int> res(dims);
  Box b;
  b.lo.resize(dims);
  b.hi.resize(dims);
  if (!(in >> key) || key != "res") throw ParseError("mask: missing res line");
  for (int& r : res)
    if (!(in >> r) || r < 1) throw ParseError("mask: bad resolution");
  if (!(in >> key) || key != "lo") throw ParseError("mask: missing lo line");
  for (int i = 0; i < dims; ++i)
    if (!(in >> b.lo(i))) throw ParseError("mask: bad lo");
  if (!(in >> key) || key != "hi") throw ParseError("mask: missing hi line");
  for (int i = 0; i < dims; ++i)
    if (!(in >> b.hi(i)) || !(b.hi(i) > b.lo(i))) throw ParseError("mask: bad hi");
  Mask X(b, res, false);
  std::size_t k = 0;
  char ch;
  while (in.get(ch)) {
    if (ch == '0' || ch == '1') {
      if (k >= X.data.size()) throw ParseError("mask: too many cells");
      X.data[k++] = ch == '1';
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw ParseError(std::string("mask: unexpected character '") + ch + "'");
    }
  }
  if (k != X.data.size()) throw ParseError("mask: expected " + std::to_string(X.data.size()) + " cells");
  return X;
}

void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::add(const std::string& key, double value) { entries_.emplace_back(key, format_double(value)); }
void Report::add(const std::string& key, long long value) { entries_.emplace_back(key, std::to_string(value)); }

std::string Report::str() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + "=" + v + "\n";
  return s;
}

}  // namespace expamoeba
