#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctrees/family.hpp"

namespace ctrees {

struct RootSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootOptions {
  int max_sweeps = 200;
  // Accept a root r only when |p(r)| <= residual_factor * max|coeff| * (1+|r|)^deg.
  double residual_factor = 1e-8;
};

struct RootResult {
  std::vector<cplx> roots;       // sorted by (re, im), multiplicity as repeats
  std::vector<double> residuals; // |p(root)| at the input coefficients
  int sweeps = 0;
};

// All complex roots of sum coeffs[k] z^k by simultaneous (Ehrlich-Aberth)
// iteration, with closed forms for degree <= 2.  Leading coefficients below
// 1e-14 (relative) are trimmed first; trailing near-zero coefficients become
// exact zero roots.  Throws RootSolveError when the residual bound fails.
RootResult find_polynomial_roots(std::vector<cplx> coeffs, const RootOptions& opt = {});

// Greedy clustering of near-coincident roots: representatives with counts.
std::vector<std::pair<cplx, int>> cluster_roots(const std::vector<cplx>& roots, double radius);

struct CloudPoint {
  cplx z;
  int degree = 0;          // degree of the generating polynomial
  double residual = 0.0;   // |p(z)| for that polynomial
  std::string provenance;  // generating equation, e.g. "13~2=21~2" or "tip 111~2"
};

struct RootCloud {
  std::vector<CloudPoint> points;  // sorted by (re, im)
};

struct CloudOptions {
  std::uint64_t pair_budget = 1000000;  // enumerated tip pairs (or equations)
  double cluster_radius = 1e-7;
  bool exclude_declared = true;
  int workers = 1;  // root extraction parallelism; output is order-independent
};

// Periods used to close finite words into addresses: the declared relation
// periods, or every single-letter period when nothing is declared.
std::vector<Word> default_tails(const Family& fam);

// Admissible parameters where some tip coincidence u|t = v|t' (u1 != v1,
// |u|,|v| <= level, t,t' drawn from tails) can hold: roots of the defect
// numerators.  Tips are deduplicated by canonical address and defects by a
// scale-normalized coefficient key before any root extraction.
RootCloud relation_root_cloud(const Family& fam, int level, std::vector<Word> tails,
                              const CloudOptions& opt = {});

// Admissible parameters where the root 0 acquires an address: roots of the
// node equations node(v) = 0 (1 <= |v| <= order) and of the tip equations
// tip(v|t) = 0 (0 <= |v| <= order, t from tails).
RootCloud root_connectivity_cloud(const Family& fam, int order, std::vector<Word> tails,
                                  const CloudOptions& opt = {});

void write_cloud_csv(const RootCloud& cloud, std::ostream& out);
void write_cloud_csv_file(const RootCloud& cloud, const std::string& path);
std::string cloud_json_text(const RootCloud& cloud);
void write_cloud_json_file(const RootCloud& cloud, const std::string& path);

}  // namespace ctrees
