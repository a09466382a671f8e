#include "umcmc/models/data_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace umcmc {

namespace {

std::vector<std::string> data_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open data file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

template <class T>
T parse_single(const std::string& line, const std::filesystem::path& path) {
  std::istringstream ss(line);
  T value{};
  std::string rest;
  if (!(ss >> value) || (ss >> rest)) {
    throw DataFormatError("malformed observation '" + line + "' in " + path.string());
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot write data file " + path.string());
  return out;
}

}  // namespace

std::vector<double> read_real_series(const std::filesystem::path& path) {
  std::vector<double> values;
  for (const auto& line : data_lines(path)) values.push_back(parse_single<double>(line, path));
  return values;
}

std::vector<int> read_integer_series(const std::filesystem::path& path) {
  std::vector<int> values;
  for (const auto& line : data_lines(path)) values.push_back(parse_single<int>(line, path));
  return values;
}

void write_real_series(const std::filesystem::path& path, const std::vector<double>& values) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

void write_integer_series(const std::filesystem::path& path, const std::vector<int>& values) {
  auto out = open_out(path);
  for (int v : values) out << v << '\n';
}

IsingLattice read_ising_lattice(const std::filesystem::path& path) {
  const auto lines = data_lines(path);
  IsingLattice lattice;
  lattice.side = static_cast<int>(lines.size());
  for (const auto& line : lines) {
    std::istringstream ss(line);
    int v = 0;
    int count = 0;
    while (ss >> v) {
      if (v != 1 && v != -1) throw DataFormatError("spins must be +1 or -1 in " + path.string());
      lattice.spins.push_back(static_cast<std::int8_t>(v));
      ++count;
    }
    if (!ss.eof() || count != lattice.side) throw DataFormatError("lattice must be square in " + path.string());
  }
  if (lattice.side == 0) throw DataFormatError("empty lattice in " + path.string());
  return lattice;
}

void write_ising_lattice(const std::filesystem::path& path, const IsingLattice& lattice) {
  auto out = open_out(path);
  for (int r = 0; r < lattice.side; ++r) {
    for (int c = 0; c < lattice.side; ++c) {
      if (c) out << ' ';
      out << static_cast<int>(lattice.at(r, c));
    }
    out << '\n';
  }
}

}  // namespace umcmc
