#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrees {

using cplx = std::complex<double>;

// Hard cap on word length per component (preamble or period).
inline constexpr std::size_t kMaxWordLength = std::size_t{1} << 16;

// Default tolerance for deciding that two tip points coincide.
inline constexpr double kDefaultRelationTol = 1e-9;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Alphabet of contraction factors c_1..c_n with 0 < |c_j| < 1, pairwise
// distinct.  The attractor of the maps z -> 1 + c_j z lives in the disk
// |z - 1| <= r/(1-r) where r = max |c_j|.  Symbols are 1-based.
class Alphabet {
 public:
  explicit Alphabet(std::vector<cplx> letters);

  int size() const { return static_cast<int>(letters_.size()); }
  cplx letter(int symbol) const;
  const std::vector<cplx>& letters() const { return letters_; }

  double contraction() const { return contraction_; }       // max |c_j|
  double bounding_radius() const;                           // r/(1-r)

 private:
  std::vector<cplx> letters_;
  double contraction_ = 0.0;
};

// Finite word over symbols 1..n.  Empty word allowed (it denotes the root).
struct Word {
  std::vector<int> symbols;

  Word() = default;
  explicit Word(std::vector<int> s);

  static Word parse(const std::string& digits);  // "132" -> [1,3,2]

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  std::string str() const;

  friend auto operator<=>(const Word&, const Word&) = default;
};

// Eventually periodic word u|v = u v v v ... stored in canonical form:
// the period is primitive and the preamble is the shortest one whose last
// symbol differs from the last symbol of the (suitably rotated) period.
// Canonical form makes operator== coincide with equality of the infinite
// sequences.
class EpWord {
 public:
  EpWord(Word preamble, Word period);

  static EpWord parse(const std::string& text);  // "13~2", "~2"

  const Word& preamble() const { return pre_; }
  const Word& period() const { return per_; }

  int first_symbol() const;
  int symbol_at(std::size_t i) const;  // i-th symbol of the infinite word
  std::string str() const;             // "13~2"

  friend auto operator<=>(const EpWord&, const EpWord&) = default;

 private:
  Word pre_;
  Word per_;
};

// Claimed tip coincidence between two addresses with distinct first symbols.
struct Relation {
  EpWord left;
  EpWord right;

  Relation(EpWord a, EpWord b);

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

// Affine similarity z -> node + scale * (z - 1); node is the image of 1.
// The map of a word v is f_v = f_{v1} o ... o f_{vm}, whose node is the
// tree node of v and whose scale is the product of its letters.
struct Similarity {
  cplx node{1.0, 0.0};
  cplx scale{1.0, 0.0};

  cplx operator()(cplx z) const { return node + scale * (z - 1.0); }
};

Similarity compose(const Similarity& a, const Similarity& b);  // a after b
Similarity inverse(const Similarity& s);

// Partial sums of letters along a word: node(v) = 1 + sum of all prefix
// products of v.  The empty word maps to 1.
cplx node_point(const Word& v, const Alphabet& a);

// Product of the letters of v (1 for the empty word).
cplx letter_product(const Word& v, const Alphabet& a);

// Limit point of the infinite address u|v, via the closed form
//   node(u) + prod(u) * (node(v) - 1) / (1 - prod(v)).
cplx tip_point(const EpWord& w, const Alphabet& a);

Similarity similarity_of(const Word& v, const Alphabet& a);

// f_u^{-1} o f_v; the identity iff the pieces of u and v tile identically.
Similarity neighbor_map(const Word& u, const Word& v, const Alphabet& a);

// |tip(left) - tip(right)| at this alphabet.
double relation_residual(const Relation& r, const Alphabet& a);

// Certifies F_u = F_v.  Direct test: tips and letter products both agree
// within tol.  When the direct test fails the pieces may still coincide as
// sets (the two unions of child pieces can match crosswise), so up to
// refine_depth levels of children are matched pairwise.
bool pieces_coincide(const Word& u, const Word& v, const Alphabet& a,
                     double tol = kDefaultRelationTol, int refine_depth = 2);

// Drop the first symbol of the infinite word.
EpWord shift(const EpWord& w);

// Union of all forward shift orbits of the relation addresses (shifts by
// m >= 1).  Sorted, duplicate-free; always finite for these addresses.
std::vector<EpWord> post_critical_set(const std::vector<Relation>& rels);

}  // namespace ctrees
