#include "nlslab/snapshot.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "nlslab/error.hpp"

namespace nlslab {

void write_snapshot(std::ostream& out, const RadialField& f) {
  const auto& grid = *f.grid();
  out << std::setprecision(17);
  out << grid.dimension() << ' ' << grid.size() << ' ' << grid.rmax() << '\n';
  const auto r = grid.nodes();
  for (std::size_t k = 0; k < f.size(); ++k)
    out << r[k] << ' ' << f[k].real() << ' ' << f[k].imag() << '\n';
}

void write_snapshot(const std::filesystem::path& path, const RadialField& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open snapshot for writing: " + path.string());
  write_snapshot(out, f);
}

namespace {
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return true;
  }
  return false;
}
}  // namespace

RadialField read_snapshot(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw Error("snapshot: missing header");
  std::istringstream header(line);
  int d = 0;
  std::size_t m = 0;
  double rmax = 0.0;
  if (!(header >> d >> m >> rmax)) throw Error("snapshot: malformed header");
  auto grid = RadialGrid::make(d, m, rmax);
  const auto nodes = grid->nodes();
  std::vector<cplx> values(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_data_line(in, line)) throw Error("snapshot: expected " + std::to_string(m) + " rows");
    std::istringstream row(line);
    double r = 0.0, re = 0.0, im = 0.0;
    if (!(row >> r >> re >> im)) throw Error("snapshot: malformed row " + std::to_string(k + 1));
    if (std::abs(r - nodes[k]) > 1e-12 * std::max(1.0, nodes[k]))
      throw Error("snapshot: node radius does not match grid at row " + std::to_string(k + 1));
    values[k] = {re, im};
  }
  return RadialField(std::move(grid), std::move(values));
}

RadialField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open snapshot: " + path.string());
  return read_snapshot(in);
}

}  // namespace nlslab
