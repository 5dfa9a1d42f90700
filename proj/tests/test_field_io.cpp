#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fraclab/atoms.hpp"
#include "fraclab/field_io.hpp"
#include "fraclab/synth.hpp"

using namespace fraclab;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "fraclab_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("flat binary round trip is bit exact") {
  for (int dim : {1, 2}) {
    GridSpec g(dim, 32, 2.5);
    const ScalarField f = random_smooth_field(g, 7 + dim, 9);
    const auto path = temp_dir() / ("field_" + std::to_string(dim) + ".bin");
    write_field_binary(path, f, 0.625);
    const LoadedField back = read_field_binary(path);
    CHECK(back.time == 0.625);
    CHECK(back.field.grid == g);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.field[i] == f[i]);
  }
}

TEST_CASE("csv export is 1-d only and carries one row per node") {
  GridSpec g(1, 16, 1.0);
  const ScalarField f = random_smooth_field(g, 3, 5);
  const auto path = temp_dir() / "field.csv";
  write_field_csv(path, f);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "x,value");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == g.n);

  GridSpec g2(2, 16, 1.0);
  CHECK_THROWS_AS(write_field_csv(temp_dir() / "bad.csv", ScalarField(g2)),
                  std::invalid_argument);
}

TEST_CASE("atom payload plus sidecar round trip") {
  GridSpec g(1, 256, 4.0);
  AtomParams prm;
  prm.omega = 0.4;
  const Atom atom = build_canonical_atom(g, 0.25, prm);
  const auto path = temp_dir() / "atom.bin";
  write_atom(path, atom);
  CHECK(std::filesystem::exists(temp_dir() / "atom.json"));
  const Atom back = read_atom(path);
  CHECK(back.r == atom.r);
  CHECK(back.lambda == atom.lambda);
  CHECK(back.params.omega == atom.params.omega);
  CHECK(back.params.A == atom.params.A);
  CHECK(back.center[0] == atom.center[0]);
  for (std::size_t i = 0; i < atom.field.size(); ++i)
    CHECK(back.field[i] == atom.field[i]);
}

TEST_CASE("trajectory export writes one payload per snapshot") {
  GridSpec g(1, 64, 4.0);
  const ScalarField psi0 = positivized(random_smooth_field(g, 4, 8));
  SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.horizon = 0.1;
  cfg.dt = 0.05;
  const Trajectory traj =
      solve_dual(psi0, VectorField(g, {ScalarField(g)}), 0.1, cfg);
  const auto dir = temp_dir() / "traj";
  std::filesystem::remove_all(dir);
  write_trajectory(dir, traj);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03zu.bin", k);
    const LoadedField back = read_field_binary(dir / name);
    CHECK(back.time == traj.snapshots[k].first);
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    CHECK(std::filesystem::exists(dir / name));
  }
}

TEST_CASE("csv quoting follows RFC 4180") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("with,comma") == "\"with,comma\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_quote("") == "");
}

TEST_CASE("missing files surface their path") {
  CHECK_THROWS_WITH_AS(read_field_binary("/nonexistent/f.bin"),
                       doctest::Contains("/nonexistent/f.bin"), std::runtime_error);
}
