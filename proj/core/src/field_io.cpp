#include "fraclab/field_io.hpp"

#include "fraclab/solver.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include <json.hpp>

namespace fraclab {

static_assert(std::endian::native == std::endian::little,
              "flat binary field format assumes a little-endian host");

void write_field_binary(const std::filesystem::path& path, const ScalarField& field,
                        double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open " + path.string());
  const std::uint32_t dim = static_cast<std::uint32_t>(field.grid.dim);
  const std::uint32_t n = static_cast<std::uint32_t>(field.grid.n);
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&field.grid.length), sizeof(double));
  out.write(reinterpret_cast<const char*>(&time), sizeof(double));
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_field_binary: write failed on " + path.string());
}

LoadedField read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field_binary: cannot open " + path.string());
  std::uint32_t dim = 0, n = 0;
  double length = 0.0, time = 0.0;
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  in.read(reinterpret_cast<char*>(&time), sizeof time);
  if (!in) throw std::runtime_error("read_field_binary: truncated header in " + path.string());
  LoadedField out;
  out.field = ScalarField(GridSpec(static_cast<int>(dim), static_cast<int>(n), length));
  out.time = time;
  in.read(reinterpret_cast<char*>(out.field.values.data()),
          static_cast<std::streamsize>(out.field.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_field_binary: truncated payload in " + path.string());
  return out;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
  if (field.grid.dim != 1)
    throw std::invalid_argument("write_field_csv: CSV export is 1-d only");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path.string());
  out << "x,value\n";
  char buf[64];
  for (int i = 0; i < field.grid.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", i * field.grid.spacing(), field[i]);
    out << buf;
  }
}

void write_atom(const std::filesystem::path& payload_path, const Atom& atom) {
  write_field_binary(payload_path, atom.field);
  nlohmann::json meta{
      {"r", atom.r},
      {"p", std::isinf(atom.params.p) ? -1.0 : atom.params.p},
      {"A", atom.params.A},
      {"omega", atom.params.omega},
      {"epsilon", atom.params.epsilon},
      {"lambda", atom.lambda},
      {"center", std::vector<double>(atom.center.begin(),
                                     atom.center.begin() + atom.field.grid.dim)},
  };
  std::filesystem::path side = payload_path;
  side.replace_extension(".json");
  std::ofstream out(side);
  if (!out) throw std::runtime_error("write_atom: cannot open " + side.string());
  out << meta.dump(2) << "\n";
}

Atom read_atom(const std::filesystem::path& payload_path) {
  Atom atom;
  atom.field = read_field_binary(payload_path).field;
  std::filesystem::path side = payload_path;
  side.replace_extension(".json");
  std::ifstream in(side);
  if (!in) throw std::runtime_error("read_atom: cannot open " + side.string());
  nlohmann::json meta = nlohmann::json::parse(in);
  atom.r = meta.at("r").get<double>();
  const double p = meta.at("p").get<double>();
  atom.params.p = p < 0.0 ? std::numeric_limits<double>::infinity() : p;
  atom.params.A = meta.at("A").get<double>();
  atom.params.omega = meta.at("omega").get<double>();
  atom.params.epsilon = meta.value("epsilon", 0.0);
  atom.lambda = meta.at("lambda").get<double>();
  const auto center = meta.at("center").get<std::vector<double>>();
  for (std::size_t a = 0; a < center.size() && a < 2; ++a) atom.center[a] = center[a];
  return atom;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      bool with_csv) {
  std::filesystem::create_directories(dir);
  char name[64];
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& [t, field] = traj.snapshots[k];
    std::snprintf(name, sizeof name, "snapshot_%03zu.bin", k);
    write_field_binary(dir / name, field, t);
    if (with_csv && field.grid.dim == 1) {
      std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
      write_field_csv(dir / name, field);
    }
  }
}

std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

} // namespace fraclab
