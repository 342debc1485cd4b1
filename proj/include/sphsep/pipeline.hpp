#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphsep/io.hpp"
#include "sphsep/multiscale.hpp"
#include "sphsep/synthetic.hpp"

namespace sphsep {

// End-to-end run settings for the command-line surface.
struct RunConfig {
  int j0 = 2;
  int jmax = 6;
  KernelOrders orders{};
  int n_lat = 64;
  int n_lon = 64;
  double radius = 1.0;
  double bin_deg = 2.5;
  double huber_c = 1.345;
  double radial_mean_tol = 1e-6;
  int min_cap_nodes = 9;
  std::string format = "csv";

  void validate() const {
    if (j0 < 0 || jmax < j0) throw precondition_error("RunConfig: need 0 <= j0 <= jmax");
    orders.validate();
    if (n_lat < 2 || n_lon < 4) throw precondition_error("RunConfig: grid too small");
    if (!(bin_deg > 0.0)) throw precondition_error("RunConfig: bin diameter must be positive");
    if (!(huber_c > 0.0)) throw precondition_error("RunConfig: huber constant must be positive");
    if (format != "csv" && format != "json")
      throw precondition_error("RunConfig: format must be csv or json");
  }

  MultiscaleOptions multiscale() const {
    return MultiscaleOptions{orders, min_cap_nodes, radial_mean_tol, true};
  }
};

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

inline void write_field_json(const VectorField& f, const std::filesystem::path& path) {
  const EquiangularGrid& g = *f.grid;
  nlohmann::json doc;
  doc["meta"] = {{"n_lat", g.n_lat()},
                 {"n_lon", g.n_lon()},
                 {"radius", g.radius()},
                 {"declared_degree", g.declared_degree()},
                 {"kind", "vector"}};
  std::vector<double> v1, v2, v3;
  v1.reserve(g.size());
  v2.reserve(g.size());
  v3.reserve(g.size());
  for (const Vec3& v : f.values) {
    v1.push_back(v.x);
    v2.push_back(v.y);
    v3.push_back(v.z);
  }
  doc["v1"] = v1;
  doc["v2"] = v2;
  doc["v3"] = v3;
  std::ofstream os(path);
  if (!os) throw io_error("cannot open " + path.string() + " for writing");
  os << doc.dump(2) << "\n";
}

// Writes a vector field in the requested format, returning the file name.
inline std::string emit_field(const VectorField& f, const std::filesystem::path& dir,
                              const std::string& stem, const std::string& format) {
  const std::string name = stem + (format == "json" ? ".json" : ".csv");
  if (format == "json")
    write_field_json(f, dir / name);
  else
    write_field(f, dir / name);
  return name;
}

}  // namespace detail

// Loads either a gridded vector field or a scattered dataset; scattered data
// is binned onto the config's grid with its ingest settings.
inline VectorField load_vector_input(const std::filesystem::path& input, const RunConfig& cfg) {
  cfg.validate();
  if (looks_scattered(input)) {
    IngestConfig icfg;
    icfg.bin_deg = cfg.bin_deg;
    icfg.huber_c = cfg.huber_c;
    return ingest(read_scattered(input), make_grid(cfg.n_lat, cfg.n_lon, cfg.radius), icfg).field;
  }
  return read_vector_field(input);
}

struct SeparationRunReport {
  std::filesystem::path out_dir;
  double radial_mean = 0.0;
  int ingest_empty_cells = -1;  // -1 when the input was already gridded
  std::map<std::string, double> part_sup;  // sup norm per emitted field
};

// Loads a gridded or scattered input, separates it, and writes parts, per-
// scale details, the residual (input minus internal part) and a manifest.
inline SeparationRunReport run_separation(const std::filesystem::path& input,
                                          const RunConfig& cfg,
                                          const std::filesystem::path& out_dir) {
  cfg.validate();
  detail::ensure_dir(out_dir);

  SeparationRunReport report;
  report.out_dir = out_dir;

  VectorField b;
  nlohmann::json ingest_info;
  if (looks_scattered(input)) {
    const ScatteredDataset data = read_scattered(input);
    IngestConfig icfg;
    icfg.bin_deg = cfg.bin_deg;
    icfg.huber_c = cfg.huber_c;
    IngestResult ir = ingest(data, make_grid(cfg.n_lat, cfg.n_lon, cfg.radius), icfg);
    b = std::move(ir.field);
    report.ingest_empty_cells = ir.n_empty;
    ingest_info = {{"records", data.records.size()},
                   {"empty_cells", ir.n_empty},
                   {"bin_deg", cfg.bin_deg},
                   {"huber_c", cfg.huber_c}};
    std::vector<int> filled;
    for (std::size_t i = 0; i < ir.filled.size(); ++i)
      if (ir.filled[i]) filled.push_back(static_cast<int>(i));
    ingest_info["filled_nodes"] = filled;
  } else {
    b = read_vector_field(input);
  }

  const SeparationResult sep = separate(b, cfg.j0, cfg.jmax, cfg.multiscale());
  report.radial_mean = sep.radial_mean;

  nlohmann::json manifest;
  manifest["j0"] = sep.j0;
  manifest["jmax"] = sep.jmax;
  manifest["orders"] = {{"green", cfg.orders.green}, {"single_layer", cfg.orders.single_layer}};
  std::vector<double> rho;
  for (int j = sep.j0; j <= sep.jmax; ++j) rho.push_back(std::ldexp(1.0, -j));
  manifest["rho_schedule"] = rho;
  manifest["radial_mean"] = sep.radial_mean;
  manifest["format"] = cfg.format;
  manifest["grid"] = {{"n_lat", b.grid->n_lat()}, {"n_lon", b.grid->n_lon()},
                      {"radius", b.grid->radius()}};
  if (!ingest_info.is_null()) manifest["ingest"] = ingest_info;

  nlohmann::json files;
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal}) {
    const std::string stem = std::string("part_") + to_string(part);
    files[stem] = detail::emit_field(sep.parts.of(part), out_dir, stem, cfg.format);
    report.part_sup[stem] = sup_norm(sep.parts.of(part));
  }
  for (const auto& [j, det] : sep.details)
    for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal}) {
      const std::string stem = "detail_j" + std::to_string(j) + "_" + to_string(part);
      files[stem] = detail::emit_field(det.of(part), out_dir, stem, cfg.format);
    }

  VectorField residual = b;
  for (std::size_t i = 0; i < residual.values.size(); ++i)
    residual.values[i] -= sep.parts.internal.values[i];
  files["residual"] = detail::emit_field(residual, out_dir, "residual", cfg.format);
  report.part_sup["residual"] = sup_norm(residual);

  manifest["files"] = files;
  nlohmann::json sups;
  for (const auto& [k, v] : report.part_sup) sups[k] = v;
  manifest["sup_norms"] = sups;

  std::ofstream ms(out_dir / "manifest.json");
  if (!ms) throw io_error("cannot open manifest in " + out_dir.string());
  ms << manifest.dump(2) << "\n";
  return report;
}

// Writes a synthetic field plus its exact per-part ground truth and manifest.
inline SyntheticField synthesize_to_dir(const SyntheticSpec& spec, int n_lat, int n_lon,
                                        const std::filesystem::path& out_dir,
                                        const std::string& format = "csv") {
  detail::ensure_dir(out_dir);
  SyntheticField f = make_field(spec, make_grid(n_lat, n_lon, spec.radius));

  nlohmann::json manifest;
  nlohmann::json terms = nlohmann::json::array();
  for (const SyntheticTerm& t : spec.terms)
    terms.push_back({{"component", t.component}, {"n", t.n}, {"k", t.k},
                     {"amplitude", t.amplitude}});
  manifest["terms"] = terms;
  manifest["radius"] = spec.radius;
  manifest["field"] = detail::emit_field(f.total, out_dir, "field", format);
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal}) {
    const std::string stem = std::string("truth_") + to_string(part);
    manifest["truth"][to_string(part)] = detail::emit_field(f.truth.of(part), out_dir, stem, format);
    manifest["truth_sup"][to_string(part)] = sup_norm(f.truth.of(part));
  }

  std::ofstream ms(out_dir / "ground_truth.json");
  if (!ms) throw io_error("cannot open ground truth manifest in " + out_dir.string());
  ms << manifest.dump(2) << "\n";
  return f;
}

struct OracleCompareReport {
  double input_sup = 0.0;
  // sup |multiscale part - oracle reconstruction|, absolute and relative to
  // the input sup norm
  std::map<std::string, double> abs_diff, rel_diff;
};

// Compares an already-computed pyramid separation against the independent
// spectral projection, reporting per-part disagreement.
inline OracleCompareReport oracle_compare(const VectorField& b, const SeparationResult& sep,
                                          int lmax,
                                          const std::filesystem::path* out_path = nullptr) {
  const SpectralCoefficients coeffs = spectral_oracle(b, lmax);

  OracleCompareReport report;
  report.input_sup = sup_norm(b);
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal}) {
    const VectorField oracle_part = reconstruct_part(coeffs, part, b.grid);
    const double d = sup_distance(sep.parts.of(part), oracle_part);
    report.abs_diff[to_string(part)] = d;
    report.rel_diff[to_string(part)] = report.input_sup > 0.0 ? d / report.input_sup : 0.0;
  }

  if (out_path) {
    nlohmann::json doc;
    doc["j0"] = sep.j0;
    doc["jmax"] = sep.jmax;
    doc["lmax"] = lmax;
    doc["input_sup"] = report.input_sup;
    for (const auto& [k, v] : report.abs_diff) doc["abs_diff"][k] = v;
    for (const auto& [k, v] : report.rel_diff) doc["rel_diff"][k] = v;
    std::ofstream os(*out_path);
    if (!os) throw io_error("cannot open " + out_path->string());
    os << doc.dump(2) << "\n";
  }
  return report;
}

// Convenience overload running the pyramid separation itself first.
inline OracleCompareReport oracle_compare(const VectorField& b, int lmax, const RunConfig& cfg,
                                          const std::filesystem::path* out_path = nullptr) {
  cfg.validate();
  return oracle_compare(b, separate(b, cfg.j0, cfg.jmax, cfg.multiscale()), lmax, out_path);
}

// Per-scale summary of the pyramid: detail sup norms and partial-sum sup
// norms, written as a plot-ready CSV.
inline SeparationResult pyramid_to_dir(const VectorField& b, const RunConfig& cfg,
                                       const std::filesystem::path& out_dir) {
  cfg.validate();
  detail::ensure_dir(out_dir);
  const SeparationResult sep = separate(b, cfg.j0, cfg.jmax, cfg.multiscale());

  std::ofstream os(out_dir / "pyramid.csv");
  if (!os) throw io_error("cannot open pyramid.csv in " + out_dir.string());
  os << "scale,part,detail_sup,partial_sup\n";
  PartFields partial = sep.trend;
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal})
    os << cfg.j0 << ',' << to_string(part) << ",0," << detail::fmt(sup_norm(partial.of(part)))
       << "\n";
  for (const auto& [j, det] : sep.details) {
    partial.add(det);
    for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal})
      os << (j + 1) << ',' << to_string(part) << ',' << detail::fmt(sup_norm(det.of(part)))
         << ',' << detail::fmt(sup_norm(partial.of(part))) << "\n";
  }
  for (SourcePart part : {SourcePart::internal, SourcePart::external, SourcePart::toroidal})
    detail::emit_field(sep.details.empty()
                           ? sep.trend.of(part)
                           : sep.parts.of(part),
                       out_dir, std::string("pyramid_top_") + to_string(part), cfg.format);
  return sep;
}

}  // namespace sphsep
