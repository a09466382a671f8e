#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "umcmc/models/ising.hpp"

namespace umcmc {

class DataFormatError : public std::runtime_error {
 public:
  explicit DataFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Plain text, one observation per line; blank lines and '#' comments skipped.
std::vector<double> read_real_series(const std::filesystem::path& path);
std::vector<int> read_integer_series(const std::filesystem::path& path);
void write_real_series(const std::filesystem::path& path, const std::vector<double>& values);
void write_integer_series(const std::filesystem::path& path, const std::vector<int>& values);

// One lattice row per line, spins as whitespace-separated +1 / -1.
IsingLattice read_ising_lattice(const std::filesystem::path& path);
void write_ising_lattice(const std::filesystem::path& path, const IsingLattice& lattice);

}  // namespace umcmc
