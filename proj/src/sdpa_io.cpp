#include "conic_alm/sdpa_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace conic_alm {

namespace {

struct Line {
  int number;
  std::string text;
};

bool is_blank_or_comment(const std::string& s) {
  const auto pos = s.find_first_not_of(" \t\r");
  if (pos == std::string::npos) return true;
  return s[pos] == '"' || s[pos] == '*';
}

// SDPA writers decorate vectors with braces and commas.
std::string strip_punctuation(std::string s) {
  for (char& ch : s) {
    if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
  }
  return s;
}

long parse_leading_int(const Line& line, const char* what) {
  std::istringstream ss(strip_punctuation(line.text));
  long v = 0;
  if (!(ss >> v)) throw SdpaError(std::string("expected ") + what, line.number);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SdpProblem sdpa_parse(std::istream& in, const std::string& name) {
  std::vector<Line> lines;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!is_blank_or_comment(text)) lines.push_back({number, text});
  }
  if (lines.size() < 4) throw SdpaError("truncated header (need m, nblocks, blockstruct, b)", number);

  const long m = parse_leading_int(lines[0], "number of constraints m");
  if (m < 1) throw SdpaError("m must be positive", lines[0].number);
  const long nblocks = parse_leading_int(lines[1], "number of blocks");
  if (nblocks != 1) {
    throw SdpaError("unsupported feature: only a single block is supported", lines[1].number);
  }
  const long n = parse_leading_int(lines[2], "block structure");
  if (n <= 0) {
    throw SdpaError("unsupported feature: only a dense semidefinite block is supported",
                    lines[2].number);
  }

  Eigen::VectorXd b(m);
  {
    std::istringstream ss(strip_punctuation(lines[3].text));
    for (long i = 0; i < m; ++i) {
      if (!(ss >> b(i))) throw SdpaError("expected " + std::to_string(m) + " entries of b", lines[3].number);
    }
    std::string extra;
    if (ss >> extra) throw SdpaError("trailing data after b", lines[3].number);
  }

  std::vector<Eigen::MatrixXd> mats(m + 1, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXi> seen(m + 1, Eigen::MatrixXi::Zero(n, n));
  for (std::size_t k = 4; k < lines.size(); ++k) {
    const Line& line = lines[k];
    std::istringstream ss(strip_punctuation(line.text));
    long matno = 0, blkno = 0, i = 0, j = 0;
    double value = 0.0;
    if (!(ss >> matno >> blkno >> i >> j >> value)) {
      throw SdpaError("malformed entry, expected 'matno blkno i j value'", line.number);
    }
    std::string extra;
    if (ss >> extra) throw SdpaError("trailing data after entry", line.number);
    if (matno < 0 || matno > m) throw SdpaError("matrix index out of range", line.number);
    if (blkno != 1) throw SdpaError("block index out of range", line.number);
    if (i < 1 || i > n || j < 1 || j > n) throw SdpaError("entry index out of range", line.number);
    if (i > j) std::swap(i, j);
    if (seen[matno](i - 1, j - 1)) throw SdpaError("duplicate entry", line.number);
    seen[matno](i - 1, j - 1) = 1;
    mats[matno](i - 1, j - 1) = value;
    mats[matno](j - 1, i - 1) = value;
  }

  std::vector<SymMatrix> a;
  a.reserve(m);
  for (long i = 1; i <= m; ++i) a.emplace_back(mats[i]);
  try {
    return SdpProblem(SymMatrix(mats[0]), std::move(a), std::move(b), name);
  } catch (const std::invalid_argument& e) {
    throw SdpaError(e.what(), 0);
  }
}

SdpProblem sdpa_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SdpaError("cannot open " + path.string(), 0);
  return sdpa_parse(in, path.stem().string());
}

void sdpa_format(const SdpProblem& p, std::ostream& out) {
  const Eigen::Index n = p.n();
  out << "\"" << (p.name().empty() ? "problem" : p.name()) << "\n";
  out << p.m() << "\n1\n" << n << "\n";
  for (Eigen::Index i = 0; i < p.m(); ++i) out << (i ? " " : "") << format_double(p.b()(i));
  out << "\n";
  auto emit = [&](Eigen::Index matno, const SymMatrix& s) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        if (s(i, j) != 0.0) {
          out << matno << " 1 " << i + 1 << " " << j + 1 << " " << format_double(s(i, j)) << "\n";
        }
      }
    }
  };
  emit(0, p.C());
  for (Eigen::Index k = 0; k < p.m(); ++k) emit(k + 1, p.constraints()[k]);
}

void sdpa_write(const SdpProblem& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SdpaError("cannot write " + path.string(), 0);
  sdpa_format(p, out);
}

Eigen::MatrixXd read_gset(const std::filesystem::path& path, int max_vertices) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_gset: cannot open " + path.string());
  long n = 0, e = 0;
  if (!(in >> n >> e) || n < 1 || e < 0) throw std::runtime_error("read_gset: bad header");
  const long k = (max_vertices > 0 && max_vertices < n) ? max_vertices : n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, k);
  for (long t = 0; t < e; ++t) {
    long i = 0, j = 0;
    double value = 0.0;
    if (!(in >> i >> j >> value)) throw std::runtime_error("read_gset: truncated edge list");
    if (i < 1 || j < 1 || i > n || j > n || i == j) {
      throw std::runtime_error("read_gset: bad edge " + std::to_string(t + 1));
    }
    if (i <= k && j <= k) {
      w(i - 1, j - 1) += value;
      w(j - 1, i - 1) = w(i - 1, j - 1);
    }
  }
  return w;
}

}  // namespace conic_alm
