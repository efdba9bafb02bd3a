#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrees/polynomial.hpp"
#include "ctrees/words.hpp"

namespace ctrees {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the symbolic operations when a letter carries the conjugation
// flag; such families are evaluated numerically only.
struct ConjugateFamilyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FamilyLetter {
  RationalFunction fn;
  bool conjugate = false;  // letter value is conj(fn(z))
};

// One-parameter family of alphabets z -> { c_1(z), .., c_n(z) } together
// with the tip coincidences declared to hold identically on the admissible
// region (every z where all letters are defined, 0 < |c_j(z)| < 1, and the
// letters are pairwise distinct).
class Family {
 public:
  Family(std::vector<FamilyLetter> letters, std::vector<Relation> relations,
         std::string label);

  int size() const { return static_cast<int>(letters_.size()); }
  const std::vector<FamilyLetter>& letters() const { return letters_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::string& label() const { return label_; }
  bool symbolic() const;  // no conjugation flags anywhere

  // Alphabet at z, or empty on any admissibility violation.
  std::optional<Alphabet> evaluate(cplx z) const;
  Alphabet evaluate_or_throw(cplx z) const;  // DomainError with a reason

  // node/product/tip of a word as rational functions of the parameter.
  RationalFunction node_function(const Word& v) const;
  RationalFunction product_function(const Word& v) const;
  RationalFunction tip_function(const EpWord& w) const;

  // tip(left) - tip(right), normalized; identically zero for relations that
  // hold across the family.
  RationalFunction relation_defect(const Relation& r) const;

  // Max residual of all declared relations over `samples` admissible
  // parameters drawn uniformly from [-2,2]^2 by rejection (seeded).
  double verify_identities(int samples, std::uint64_t seed) const;

  // Built-in catalog: ternary-up, ternary-down, binary-b1, binary-b2,
  // binary-b3, plusminus, conjugate, ngon (ngon takes the order argument).
  static Family preset(const std::string& name, int ngon_order = 0);
  static const std::vector<std::string>& preset_names();

  static Family from_json_file(const std::string& path);
  static Family from_json_text(const std::string& text);
  std::string to_json_text() const;
  void save_json(const std::string& path) const;

 private:
  std::vector<FamilyLetter> letters_;
  std::vector<Relation> relations_;
  std::string label_;
};

}  // namespace ctrees
