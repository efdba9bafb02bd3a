#pragma once

#include <vector>

#include "ctrees/family.hpp"
#include "ctrees/words.hpp"

namespace ctrees {

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionReport {
  double alpha = 0.0;
  double residual = 0.0;  // |sum of |c_j|^alpha - 1| at the returned alpha
  int iterations = 0;
};

// Similarity dimension: the unique alpha with sum |c_j|^alpha = 1, found by
// bisection.  Throws BracketError if the solution leaves [1e-6, 64].
DimensionReport similarity_dimension(const Alphabet& a, double tol = 1e-12);

double squared_modulus_sum(const Alphabet& a);

// Whether the similarity dimension strictly exceeds 2: sum |c_j|^2 > 1.
bool dimension_exceeds_two(const Family& fam, cplx z);

// Parameters t > 0 with sum |c_j(t e^{i angle})|^alpha = 1, scanned over
// t in (0, 4] and refined by bisection.  Brackets touching inadmissible
// parameters are skipped.  Sorted; throws NoCrossingError when empty.
std::vector<double> dimension_locus_on_ray(const Family& fam, double angle, double alpha,
                                           double tol = 1e-12);

}  // namespace ctrees
