#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "sphsep/io.hpp"
#include "test_util.hpp"

using namespace sphsep;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "sphsep-io-tests";
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

}  // namespace

TEST_CASE("Vector field round-trips bit for bit", "[io]") {
  auto grid = make_grid(8, 8, 6371.2);
  VectorField f = VectorField::zeros(grid);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (Vec3& v : f.values) v = Vec3{u(test_util::rng()), u(test_util::rng()), u(test_util::rng())};

  const fs::path p = scratch_dir() / "vec.csv";
  write_field(f, p);
  REQUIRE(fs::exists(p));
  REQUIRE(fs::exists(scratch_dir() / "vec.json"));

  const VectorField back = read_vector_field(p);
  REQUIRE(back.grid->n_lat() == 8);
  REQUIRE(back.grid->n_lon() == 8);
  REQUIRE(back.grid->radius() == 6371.2);
  for (std::size_t q = 0; q < f.values.size(); ++q)
    REQUIRE(norm(back.values[q] - f.values[q]) == 0.0);
}

TEST_CASE("Scalar field round-trips and reports its kind", "[io]") {
  auto grid = make_grid(6, 12, 42.0);
  ScalarField f = ScalarField::zeros(grid);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : f.values) v = u(test_util::rng());

  const fs::path p = scratch_dir() / "scal.csv";
  write_field(f, p);
  const LoadedField back = read_field(p);
  REQUIRE(back.kind == FieldKind::scalar);
  REQUIRE(back.scalar.values == f.values);
  REQUIRE(back.grid()->radius() == 42.0);
  REQUIRE_THROWS_AS(read_vector_field(p), io_error);
}

TEST_CASE("Missing sidecar falls back to the unit radius", "[io]") {
  auto grid = make_grid(4, 8, 123.0);
  VectorField f = VectorField::zeros(grid);
  const fs::path p = scratch_dir() / "nosidecar.csv";
  write_field(f, p);
  fs::remove(scratch_dir() / "nosidecar.json");
  REQUIRE(read_vector_field(p).grid->radius() == 1.0);
}

TEST_CASE("Sidecar inconsistencies are rejected", "[io]") {
  auto grid = make_grid(4, 8);
  VectorField f = VectorField::zeros(grid);
  const fs::path p = scratch_dir() / "tamper.csv";
  write_field(f, p);

  write_text(scratch_dir() / "tamper.json", "{\"n_lat\": 9, \"n_lon\": 8, \"radius\": 1.0}\n");
  REQUIRE_THROWS_MATCHES(
      read_field(p), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("n_lat disagrees")));

  write_text(scratch_dir() / "tamper.json", "{not json");
  REQUIRE_THROWS_MATCHES(
      read_field(p), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("malformed sidecar")));
}

TEST_CASE("Grid-field read errors", "[io]") {
  const fs::path dir = scratch_dir();

  REQUIRE_THROWS_AS(read_field(dir / "does-not-exist.csv"), io_error);

  write_text(dir / "empty.csv", "");
  REQUIRE_THROWS_AS(read_field(dir / "empty.csv"), io_error);

  write_text(dir / "badheader.csv", "a,b,c\n1,2,3\n");
  REQUIRE_THROWS_AS(read_field(dir / "badheader.csv"), io_error);

  write_text(dir / "headeronly.csv", "theta_deg,phi_deg,v1\n");
  REQUIRE_THROWS_AS(read_field(dir / "headeronly.csv"), io_error);

  write_text(dir / "junk.csv", "theta_deg,phi_deg,v1\n22.5,0,abc\n22.5,90,0\n");
  REQUIRE_THROWS_MATCHES(
      read_field(dir / "junk.csv"), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("malformed number")));

  write_text(dir / "cols.csv", "theta_deg,phi_deg,v1,v2,v3\n22.5,0,1,2\n");
  REQUIRE_THROWS_MATCHES(
      read_field(dir / "cols.csv"), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("column count")));

  write_text(dir / "layout.csv", "theta_deg,phi_deg,v1\n10,0,0\n20,0,0\n");
  REQUIRE_THROWS_MATCHES(
      read_field(dir / "layout.csv"), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("equiangular grid")));

  // Consistent 2x4 table, but the angles are not the canonical midpoints.
  write_text(dir / "angles.csv",
             "theta_deg,phi_deg,v1\n10,0,0\n10,90,0\n10,180,0\n10,270,0\n"
             "20,0,0\n20,90,0\n20,180,0\n20,270,0\n");
  REQUIRE_THROWS_MATCHES(
      read_field(dir / "angles.csv"), io_error,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("canonical")));
}

TEST_CASE("Scattered datasets round-trip and are recognized", "[io]") {
  ScatteredDataset data;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int r = 0; r < 25; ++r) {
    ScatteredRecord rec;
    rec.colat_deg = 180.0 * (r + 0.5) / 25.0;
    rec.lon_deg = std::fmod(97.0 * r, 360.0);
    rec.radius_km = 6371.0;
    rec.value = Vec3{u(test_util::rng()), u(test_util::rng()), u(test_util::rng())};
    data.records.push_back(rec);
  }

  const fs::path p = scratch_dir() / "scattered.csv";
  write_scattered(data, p);
  REQUIRE(looks_scattered(p));

  const ScatteredDataset back = read_scattered(p);
  REQUIRE(back.records.size() == data.records.size());
  for (std::size_t r = 0; r < data.records.size(); ++r) {
    REQUIRE(back.records[r].colat_deg == data.records[r].colat_deg);
    REQUIRE(back.records[r].lon_deg == data.records[r].lon_deg);
    REQUIRE(back.records[r].radius_km == data.records[r].radius_km);
    REQUIRE(norm(back.records[r].value - data.records[r].value) == 0.0);
  }

  auto grid = make_grid(4, 8);
  VectorField f = VectorField::zeros(grid);
  const fs::path gp = scratch_dir() / "gridfield.csv";
  write_field(f, gp);
  REQUIRE_FALSE(looks_scattered(gp));

  REQUIRE_THROWS_AS(read_scattered(gp), io_error);
  REQUIRE_THROWS_AS(looks_scattered(scratch_dir() / "missing.csv"), io_error);
}
