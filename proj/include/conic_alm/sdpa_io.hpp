#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "conic_alm/sdp_model.hpp"

// Single-block subset of the SDPA sparse format:
//
//   "comment lines start with a double quote (or *)
//   m
//   1                       number of blocks, must be 1
//   n                       block size, must be positive (dense PSD block)
//   b_1 b_2 ... b_m
//   matno blkno i j value   matno 0 is C, 1..m are A_1..A_m; 1-based indices
//
// C is stored as-is (not negated). Values are written with 17 significant
// digits so that read(write(p)) reproduces the data bit for bit.

namespace conic_alm {

class SdpaError : public std::runtime_error {
 public:
  SdpaError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  /// 1-based line number of the offending input, 0 if not line-specific.
  int line() const { return line_; }

 private:
  int line_;
};

SdpProblem sdpa_parse(std::istream& in, const std::string& name = "sdpa");
SdpProblem sdpa_read(const std::filesystem::path& path);

void sdpa_format(const SdpProblem& p, std::ostream& out);
void sdpa_write(const SdpProblem& p, const std::filesystem::path& path);

/// Reads a Gset edge list ("n e" header, then "i j w" lines, 1-based) and
/// returns the symmetric weight matrix of the first `max_vertices` vertices
/// (all vertices when max_vertices <= 0).
Eigen::MatrixXd read_gset(const std::filesystem::path& path, int max_vertices = 0);

}  // namespace conic_alm
