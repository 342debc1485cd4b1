#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphsep/ingest.hpp"
#include "sphsep/quadrature.hpp"

namespace sphsep {

enum class FieldKind { scalar, vector };

namespace detail {

// Shortest exact decimal form: %.17g round-trips doubles bit-for-bit, which
// keeps rewritten outputs byte-identical across runs.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::filesystem::path sidecar_path(std::filesystem::path csv) {
  csv.replace_extension(".json");
  return csv;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io_error("malformed number '" + s + "' in " + context);
  }
}

inline void write_grid_csv(const GridPtr& grid, FieldKind kind,
                           const std::vector<double>* scalars, const std::vector<Vec3>* vectors,
                           const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path.string() + " for writing");
  const EquiangularGrid& g = *grid;
  os << (kind == FieldKind::scalar ? "theta_deg,phi_deg,v1" : "theta_deg,phi_deg,v1,v2,v3")
     << "\n";
  const double deg = 180.0 / pi;
  for (int j = 0; j < g.n_lat(); ++j)
    for (int i = 0; i < g.n_lon(); ++i) {
      const std::size_t p = g.node_index(j, i);
      os << fmt(g.colatitude(j) * deg) << ',' << fmt(g.longitude(i) * deg);
      if (kind == FieldKind::scalar) {
        os << ',' << fmt((*scalars)[p]);
      } else {
        const Vec3& v = (*vectors)[p];
        os << ',' << fmt(v.x) << ',' << fmt(v.y) << ',' << fmt(v.z);
      }
      os << "\n";
    }
  if (!os) throw io_error("write failed for " + path.string());

  nlohmann::json meta{{"n_lat", g.n_lat()},
                      {"n_lon", g.n_lon()},
                      {"radius", g.radius()},
                      {"declared_degree", g.declared_degree()},
                      {"kind", kind == FieldKind::scalar ? "scalar" : "vector"}};
  std::ofstream ms(sidecar_path(path));
  if (!ms) throw io_error("cannot open sidecar for " + path.string());
  ms << meta.dump(2) << "\n";
}

}  // namespace detail

inline void write_field(const ScalarField& f, const std::filesystem::path& path) {
  detail::write_grid_csv(f.grid, FieldKind::scalar, &f.values, nullptr, path);
}

inline void write_field(const VectorField& f, const std::filesystem::path& path) {
  detail::write_grid_csv(f.grid, FieldKind::vector, nullptr, &f.values, path);
}

struct LoadedField {
  FieldKind kind = FieldKind::vector;
  ScalarField scalar;
  VectorField vector;

  const GridPtr& grid() const { return kind == FieldKind::scalar ? scalar.grid : vector.grid; }
};

// Reads a grid-field CSV (header theta_deg,phi_deg,v1[,v2,v3]).  The grid is
// rebuilt from the canonical layout and the file's angles are checked against
// it; the radius comes from the JSON sidecar when present.
inline LoadedField read_field(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw io_error("empty file " + path.string());
  auto header = detail::split_csv_line(line);
  FieldKind kind;
  if (header.size() == 3 && header[0] == "theta_deg" && header[1] == "phi_deg")
    kind = FieldKind::scalar;
  else if (header.size() == 5 && header[0] == "theta_deg" && header[1] == "phi_deg")
    kind = FieldKind::vector;
  else
    throw io_error("unrecognized grid-field header in " + path.string());

  std::vector<double> theta, phi, v1, v2, v3;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) throw io_error("wrong column count in " + ctx);
    theta.push_back(detail::parse_double(cells[0], ctx));
    phi.push_back(detail::parse_double(cells[1], ctx));
    v1.push_back(detail::parse_double(cells[2], ctx));
    if (kind == FieldKind::vector) {
      v2.push_back(detail::parse_double(cells[3], ctx));
      v3.push_back(detail::parse_double(cells[4], ctx));
    }
  }
  if (theta.empty()) throw io_error("no data rows in " + path.string());

  // infer layout: leading rows share the first colatitude
  std::size_t n_lon = 0;
  while (n_lon < theta.size() && theta[n_lon] == theta[0]) ++n_lon;
  if (n_lon < 2 || theta.size() % n_lon != 0)
    throw io_error("rows of " + path.string() + " do not form an equiangular grid");
  const std::size_t n_lat = theta.size() / n_lon;

  double radius = 1.0;
  const auto side = detail::sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream ms(side);
    nlohmann::json meta;
    try {
      ms >> meta;
    } catch (const std::exception& e) {
      throw io_error("malformed sidecar " + side.string() + ": " + e.what());
    }
    radius = meta.value("radius", 1.0);
    if (meta.contains("n_lat") && meta["n_lat"] != n_lat)
      throw io_error("sidecar n_lat disagrees with " + path.string());
    if (meta.contains("n_lon") && meta["n_lon"] != n_lon)
      throw io_error("sidecar n_lon disagrees with " + path.string());
  }

  GridPtr grid = make_grid(static_cast<int>(n_lat), static_cast<int>(n_lon), radius);
  const double deg = 180.0 / pi;
  for (std::size_t j = 0; j < n_lat; ++j)
    for (std::size_t i = 0; i < n_lon; ++i) {
      const std::size_t p = j * n_lon + i;
      if (std::abs(theta[p] - grid->colatitude(static_cast<int>(j)) * deg) > 1e-9 ||
          std::abs(phi[p] - grid->longitude(static_cast<int>(i)) * deg) > 1e-9)
        throw io_error("node angles in " + path.string() +
                       " do not match the canonical equiangular layout");
    }

  LoadedField out;
  out.kind = kind;
  if (kind == FieldKind::scalar) {
    out.scalar = ScalarField(grid, std::move(v1));
  } else {
    std::vector<Vec3> vals(v1.size());
    for (std::size_t p = 0; p < vals.size(); ++p) vals[p] = Vec3{v1[p], v2[p], v3[p]};
    out.vector = VectorField(grid, std::move(vals));
  }
  return out;
}

inline VectorField read_vector_field(const std::filesystem::path& path) {
  LoadedField f = read_field(path);
  if (f.kind != FieldKind::vector)
    throw io_error(path.string() + " holds a scalar field, expected a vector field");
  return std::move(f.vector);
}

inline constexpr const char* scattered_header = "colat_deg,lon_deg,radius_km,v1,v2,v3";

// Peeks at the header to distinguish scattered datasets from grid fields.
inline bool looks_scattered(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) return false;
  return detail::split_csv_line(line).size() == 6 &&
         detail::split_csv_line(line)[0] == "colat_deg";
}

inline ScatteredDataset read_scattered(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw io_error("empty file " + path.string());
  if (detail::split_csv_line(line) != detail::split_csv_line(scattered_header))
    throw io_error("unrecognized scattered-data header in " + path.string());
  ScatteredDataset out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (cells.size() != 6) throw io_error("wrong column count in " + ctx);
    ScatteredRecord r;
    r.colat_deg = detail::parse_double(cells[0], ctx);
    r.lon_deg = detail::parse_double(cells[1], ctx);
    r.radius_km = detail::parse_double(cells[2], ctx);
    r.value = Vec3{detail::parse_double(cells[3], ctx), detail::parse_double(cells[4], ctx),
                   detail::parse_double(cells[5], ctx)};
    out.records.push_back(r);
  }
  return out;
}

inline void write_scattered(const ScatteredDataset& data, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path.string() + " for writing");
  os << scattered_header << "\n";
  for (const ScatteredRecord& r : data.records)
    os << detail::fmt(r.colat_deg) << ',' << detail::fmt(r.lon_deg) << ','
       << detail::fmt(r.radius_km) << ',' << detail::fmt(r.value.x) << ','
       << detail::fmt(r.value.y) << ',' << detail::fmt(r.value.z) << "\n";
  if (!os) throw io_error("write failed for " + path.string());
}

}  // namespace sphsep
