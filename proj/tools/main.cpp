// Command-line surface for the spherical source-separation library.
//
// Exit codes: 0 success, 2 precondition failure, 3 under-resolution, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sphsep/sphsep.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_precondition = 2;
constexpr int exit_under_resolution = 3;
constexpr int exit_io = 4;

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return exit_ok;
  } catch (const sphsep::under_resolution_error& e) {
    std::cerr << "error (under-resolution): " << e.what() << "\n";
    return exit_under_resolution;
  } catch (const sphsep::io_error& e) {
    std::cerr << "error (i/o): " << e.what() << "\n";
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (i/o): " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_precondition;
  }
}

struct GridSize {
  int n_lat = 64;
  int n_lon = 64;
};

void parse_grid(const std::string& s, GridSize& g) {
  if (std::sscanf(s.c_str(), "%dx%d", &g.n_lat, &g.n_lon) != 2)
    throw sphsep::precondition_error("--grid expects NxM, got '" + s + "'");
}

sphsep::SyntheticSpec parse_terms(const std::string& s, double radius) {
  sphsep::SyntheticSpec spec;
  spec.radius = radius;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    const std::string item = s.substr(pos, end - pos);
    sphsep::SyntheticTerm t;
    if (std::sscanf(item.c_str(), "%d:%d:%d:%lf", &t.component, &t.n, &t.k, &t.amplitude) != 4)
      throw sphsep::precondition_error("--terms expects i:n:k:amplitude entries, got '" + item +
                                       "'");
    spec.terms.push_back(t);
    pos = end + 1;
  }
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separation of spherical vector fields into internal, external and "
               "toroidal source contributions"};
  app.require_subcommand(1);

  std::string in_path, out_dir = "out", format = "csv", grid_str, terms_str, kernel_name = "green";
  double radius = 1.0, bin_deg = 2.5, huber_c = 1.345, rho = 0.0;
  double t_min = -1.0, t_max = 0.999, radial_tol = 1e-6;
  int j0 = 2, jmax = 6, green_order = 2, single_order = 1, lmax = 8, scale = -1, order = 0;
  int steps = 200, min_cap_nodes = 9;

  auto add_common = [&](CLI::App* cmd, bool with_scales) {
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--format", format, "field file format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_scales) {
      cmd->add_option("--j0", j0, "coarsest scale of the pyramid");
      cmd->add_option("--jmax", jmax, "finest scale of the pyramid");
      cmd->add_option("--green-order", green_order, "Taylor order of the potential profile");
      cmd->add_option("--single-layer-order", single_order,
                      "Taylor order of the distance profile");
      cmd->add_option("--radial-mean-tol", radial_tol, "radial mean gate, relative");
      cmd->add_option("--min-cap-nodes", min_cap_nodes, "under-resolution threshold");
    }
  };

  auto make_config = [&](const GridSize& g) {
    sphsep::RunConfig cfg;
    cfg.j0 = j0;
    cfg.jmax = jmax;
    cfg.orders = {green_order, single_order};
    cfg.n_lat = g.n_lat;
    cfg.n_lon = g.n_lon;
    cfg.radius = radius;
    cfg.bin_deg = bin_deg;
    cfg.huber_c = huber_c;
    cfg.radial_mean_tol = radial_tol;
    cfg.min_cap_nodes = min_cap_nodes;
    cfg.format = format;
    return cfg;
  };

  GridSize grid;

  // ingest: scattered measurements -> Huber-averaged grid field
  CLI::App* c_ingest = app.add_subcommand("ingest", "bin scattered measurements onto a grid");
  c_ingest->add_option("--in", in_path, "scattered CSV (colat_deg,lon_deg,radius_km,v1,v2,v3)")
      ->required();
  c_ingest->add_option("--grid", grid_str, "grid size NxM");
  c_ingest->add_option("--bin-deg", bin_deg, "cell diameter in degrees");
  c_ingest->add_option("--huber-c", huber_c, "robust weight clipping constant");
  c_ingest->add_option("--radius", radius, "sphere radius of the output grid");
  add_common(c_ingest, false);

  // synthesize: band-limited test field with known ground truth
  CLI::App* c_synth = app.add_subcommand("synthesize", "generate a synthetic field");
  c_synth->add_option("--terms", terms_str, "comma list of i:n:k:amplitude")->required();
  c_synth->add_option("--grid", grid_str, "grid size NxM");
  c_synth->add_option("--radius", radius, "sphere radius");
  add_common(c_synth, false);

  // separate: full pyramid separation run
  CLI::App* c_sep = app.add_subcommand("separate", "separate a field into source parts");
  c_sep->add_option("--in", in_path, "grid-field CSV or scattered CSV")->required();
  c_sep->add_option("--grid", grid_str, "grid size NxM (for scattered input)");
  c_sep->add_option("--bin-deg", bin_deg, "cell diameter (for scattered input)");
  c_sep->add_option("--huber-c", huber_c, "robust constant (for scattered input)");
  add_common(c_sep, true);

  // pyramid: per-scale diagnostics
  CLI::App* c_pyr = app.add_subcommand("pyramid", "per-scale detail/partial-sum summary");
  c_pyr->add_option("--in", in_path, "grid-field CSV or scattered CSV")->required();
  c_pyr->add_option("--grid", grid_str, "grid size NxM (for scattered input)");
  add_common(c_pyr, true);

  // kernel-table: profile dump
  CLI::App* c_ker = app.add_subcommand("kernel-table", "dump a kernel profile as CSV");
  c_ker->add_option("--kernel", kernel_name, "green | single-layer | dinv-green")
      ->check(CLI::IsMember({"green", "single-layer", "dinv-green"}));
  c_ker->add_option("--rho", rho, "cap parameter (0 = unregularized)");
  c_ker->add_option("--scale", scale, "dyadic scale (rho = 2^-scale)");
  c_ker->add_option("--order", order, "Taylor order (default per kernel)");
  c_ker->add_option("--tmin", t_min, "table start");
  c_ker->add_option("--tmax", t_max, "table end");
  c_ker->add_option("--steps", steps, "number of table rows");
  add_common(c_ker, false);

  // oracle-compare: pyramid vs spectral projection
  CLI::App* c_ora = app.add_subcommand("oracle-compare",
                                       "compare the pyramid separation with the spectral oracle");
  c_ora->add_option("--in", in_path, "grid-field CSV")->required();
  c_ora->add_option("--lmax", lmax, "projection band limit");
  add_common(c_ora, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_precondition;
  }

  if (!grid_str.empty()) {
    try {
      parse_grid(grid_str, grid);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_precondition;
    }
  }
  const std::filesystem::path out(out_dir);

  if (c_ingest->parsed()) {
    return run_guarded([&] {
      const sphsep::ScatteredDataset data = sphsep::read_scattered(in_path);
      sphsep::IngestConfig icfg;
      icfg.bin_deg = bin_deg;
      icfg.huber_c = huber_c;
      const sphsep::IngestResult r =
          sphsep::ingest(data, sphsep::make_grid(grid.n_lat, grid.n_lon, radius), icfg);
      sphsep::detail::ensure_dir(out);
      const std::string name = sphsep::detail::emit_field(r.field, out, "field", format);
      nlohmann::json info{{"records", data.records.size()},
                          {"empty_cells", r.n_empty},
                          {"field", name}};
      std::ofstream os(out / "ingest.json");
      if (!os) throw sphsep::io_error("cannot open ingest.json in " + out.string());
      os << info.dump(2) << "\n";
      std::cout << "ingested " << data.records.size() << " records onto " << grid.n_lat << "x"
                << grid.n_lon << " grid (" << r.n_empty << " empty cells)\n";
    });
  }

  if (c_synth->parsed()) {
    return run_guarded([&] {
      const sphsep::SyntheticSpec spec = parse_terms(terms_str, radius);
      sphsep::synthesize_to_dir(spec, grid.n_lat, grid.n_lon, out, format);
      std::cout << "wrote synthetic field with " << spec.terms.size() << " terms to "
                << out.string() << "\n";
    });
  }

  if (c_sep->parsed()) {
    return run_guarded([&] {
      const sphsep::SeparationRunReport r = sphsep::run_separation(in_path, make_config(grid), out);
      std::cout << "separation written to " << r.out_dir.string()
                << " (radial mean " << r.radial_mean << ")\n";
      for (const auto& [k, v] : r.part_sup) std::cout << "  sup " << k << " = " << v << "\n";
    });
  }

  if (c_pyr->parsed()) {
    return run_guarded([&] {
      const sphsep::RunConfig cfg = make_config(grid);
      const sphsep::VectorField b = sphsep::load_vector_input(in_path, cfg);
      sphsep::pyramid_to_dir(b, cfg, out);
      std::cout << "pyramid summary written to " << (out / "pyramid.csv").string() << "\n";
    });
  }

  if (c_ker->parsed()) {
    return run_guarded([&] {
      using sphsep::ZonalKernelKind;
      ZonalKernelKind kind = ZonalKernelKind::green;
      int default_order = 2;
      if (kernel_name == "single-layer") {
        kind = ZonalKernelKind::single_layer;
        default_order = 1;
      } else if (kernel_name == "dinv-green") {
        kind = ZonalKernelKind::dinv_green;
        default_order = 1;
      }
      if (order == 0) order = default_order;
      if (steps < 2) throw sphsep::precondition_error("--steps must be at least 2");
      if (!(t_min < t_max)) throw sphsep::precondition_error("need --tmin < --tmax");

      std::optional<sphsep::ZonalProfile> profile;
      if (scale >= 0)
        profile.emplace(kind, sphsep::RegularizationConfig::at_scale(scale, order));
      else if (rho > 0.0)
        profile.emplace(kind, sphsep::RegularizationConfig{rho, order});
      else
        profile.emplace(kind);

      sphsep::detail::ensure_dir(out);
      std::ofstream os(out / "kernel_table.csv");
      if (!os) throw sphsep::io_error("cannot open kernel_table.csv in " + out.string());
      os << "t,value,deriv1,deriv2\n";
      for (int i = 0; i < steps; ++i) {
        const double t = t_min + (t_max - t_min) * i / (steps - 1);
        os << sphsep::detail::fmt(t) << ',' << sphsep::detail::fmt(profile->value(t)) << ','
           << sphsep::detail::fmt(profile->deriv1(t)) << ','
           << sphsep::detail::fmt(profile->deriv2(t)) << "\n";
      }
      std::cout << "kernel table written to " << (out / "kernel_table.csv").string() << "\n";
    });
  }

  if (c_ora->parsed()) {
    return run_guarded([&] {
      const sphsep::RunConfig cfg = make_config(grid);
      const sphsep::VectorField b = sphsep::read_vector_field(in_path);
      sphsep::detail::ensure_dir(out);
      const std::filesystem::path report_path = out / "oracle_compare.json";
      const sphsep::OracleCompareReport r = sphsep::oracle_compare(b, lmax, cfg, &report_path);
      std::cout << "oracle comparison (input sup " << r.input_sup << ")\n";
      for (const auto& [k, v] : r.abs_diff)
        std::cout << "  " << k << ": abs " << v << ", rel " << r.rel_diff.at(k) << "\n";
    });
  }

  return exit_ok;
}
