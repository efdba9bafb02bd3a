#pragma once

// Independent cross-checks and seeded generators for the test suite.  The
// partial-sum oracle evaluates tips term by term so a bug in the closed form
// cannot hide in both places.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "ctrees/words.hpp"

namespace ctrees::testing {

// 1 + c_{w1} + c_{w1}c_{w2} + ... with `terms` prefix products.  Truncation
// error is at most r^(terms+1)/(1-r) for r the alphabet contraction.
inline cplx tip_partial_sum(const EpWord& w, const Alphabet& a, int terms = 200) {
  cplx sum = 1.0, prod = 1.0;
  for (int k = 0; k < terms; ++k) {
    prod *= a.letter(w.symbol_at(static_cast<std::size_t>(k)));
    sum += prod;
  }
  return sum;
}

inline double tip_truncation_bound(const Alphabet& a, int terms = 200) {
  const double r = a.contraction();
  return std::pow(r, terms + 1) / (1.0 - r);
}

inline Alphabet random_alphabet(std::mt19937_64& rng, int n, double max_modulus = 0.9) {
  std::uniform_real_distribution<double> mod(0.05, max_modulus);
  std::uniform_real_distribution<double> arg(0.0, 2.0 * 3.141592653589793);
  for (;;) {
    std::vector<cplx> letters;
    letters.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) letters.push_back(std::polar(mod(rng), arg(rng)));
    bool separated = true;
    for (std::size_t i = 0; i < letters.size() && separated; ++i)
      for (std::size_t j = i + 1; j < letters.size(); ++j)
        if (std::abs(letters[i] - letters[j]) < 1e-3) {
          separated = false;
          break;
        }
    if (separated) return Alphabet(std::move(letters));
  }
}

inline Word random_word(std::mt19937_64& rng, int n, int len_min, int len_max) {
  std::uniform_int_distribution<int> len(len_min, len_max);
  std::uniform_int_distribution<int> sym(1, n);
  std::vector<int> s;
  const int count = len(rng);
  s.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) s.push_back(sym(rng));
  return Word(std::move(s));
}

inline EpWord random_epword(std::mt19937_64& rng, int n, int pre_max = 5, int per_max = 6) {
  return EpWord(random_word(rng, n, 0, pre_max), random_word(rng, n, 1, per_max));
}

}  // namespace ctrees::testing
