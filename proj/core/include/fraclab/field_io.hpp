#pragma once
//
// Field persistence. Flat binary layout (little-endian):
//   uint32 dim | uint32 n | float64 length | float64 time | n^dim float64
// with the payload row-major over axes. CSV export is provided for 1-d
// fields; atoms get a JSON metadata sidecar next to the binary payload.
//

#include <filesystem>
#include <string>

#include "fraclab/atoms.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

void write_field_binary(const std::filesystem::path& path, const ScalarField& field,
                        double time = 0.0);

struct LoadedField {
  ScalarField field;
  double time = 0.0;
};
LoadedField read_field_binary(const std::filesystem::path& path);

// "x,value" rows (RFC-4180, numeric cells need no quoting); 1-d only.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

// Binary payload plus "<stem>.json" sidecar carrying r, p, A, omega, lambda
// and the center.
void write_atom(const std::filesystem::path& payload_path, const Atom& atom);
Atom read_atom(const std::filesystem::path& payload_path);

// One flat-binary file per snapshot (snapshot_000.bin, ...) under `dir`,
// plus CSV companions when the grid is 1-d.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      bool with_csv = true);

// Minimal RFC-4180 quoting for one CSV cell.
std::string csv_quote(const std::string& cell);

} // namespace fraclab
