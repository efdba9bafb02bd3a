#include "ctrees/family.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace ctrees {

namespace {

// Letters closer than this are treated as coincident when deciding
// admissibility of a parameter.
constexpr double kDistinctEps = 0.0;
constexpr int kRejectionCap = 100000;

cplx letter_value_unchecked(const FamilyLetter& l, cplx z) {
  const auto v = l.fn.eval_checked(z);
  if (!v) return cplx{std::nan(""), std::nan("")};
  return l.conjugate ? std::conj(*v) : *v;
}

}  // namespace

Family::Family(std::vector<FamilyLetter> letters, std::vector<Relation> relations,
               std::string label)
    : letters_(std::move(letters)),
      relations_(std::move(relations)),
      label_(std::move(label)) {
  if (letters_.size() < 2) throw InputError("family needs at least 2 letters");
  const int n = size();
  for (const Relation& r : relations_) {
    auto check = [n](const EpWord& w) {
      for (std::size_t i = 0; i < w.preamble().size(); ++i)
        if (w.preamble().symbols[i] > n) throw InputError("relation symbol out of range");
      for (std::size_t i = 0; i < w.period().size(); ++i)
        if (w.period().symbols[i] > n) throw InputError("relation symbol out of range");
    };
    check(r.left);
    check(r.right);
  }
}

bool Family::symbolic() const {
  for (const FamilyLetter& l : letters_)
    if (l.conjugate) return false;
  return true;
}

std::optional<Alphabet> Family::evaluate(cplx z) const {
  std::vector<cplx> vals;
  vals.reserve(letters_.size());
  for (const FamilyLetter& l : letters_) {
    const auto v = l.fn.eval_checked(z);
    if (!v) return std::nullopt;
    const cplx c = l.conjugate ? std::conj(*v) : *v;
    const double m = std::abs(c);
    if (!(m > 0.0) || !(m < 1.0) || !std::isfinite(m)) return std::nullopt;
    vals.push_back(c);
  }
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      if (std::abs(vals[i] - vals[j]) <= kDistinctEps) return std::nullopt;
  return Alphabet(std::move(vals));
}

Alphabet Family::evaluate_or_throw(cplx z) const {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    const cplx c = letter_value_unchecked(letters_[i], z);
    const double m = std::abs(c);
    if (!std::isfinite(m))
      throw DomainError("letter " + std::to_string(i + 1) + " has a pole at this parameter");
    if (!(m > 0.0))
      throw DomainError("letter " + std::to_string(i + 1) + " vanishes at this parameter");
    if (!(m < 1.0))
      throw DomainError("letter " + std::to_string(i + 1) + " is not a contraction here (|c| = " +
                        std::to_string(m) + ")");
  }
  auto a = evaluate(z);
  if (!a) throw DomainError("letters are not pairwise distinct at this parameter");
  return *a;
}

RationalFunction Family::node_function(const Word& v) const {
  if (!symbolic()) throw ConjugateFamilyError("symbolic form unavailable for conjugate families");
  RationalFunction acc(1.0);
  RationalFunction prod(1.0);
  for (int s : v.symbols) {
    if (s > size()) throw InputError("symbol out of range for family");
    prod = prod * letters_[static_cast<std::size_t>(s - 1)].fn;
    acc = acc + prod;
  }
  return acc;
}

RationalFunction Family::product_function(const Word& v) const {
  if (!symbolic()) throw ConjugateFamilyError("symbolic form unavailable for conjugate families");
  RationalFunction prod(1.0);
  for (int s : v.symbols) {
    if (s > size()) throw InputError("symbol out of range for family");
    prod = prod * letters_[static_cast<std::size_t>(s - 1)].fn;
  }
  return prod;
}

RationalFunction Family::tip_function(const EpWord& w) const {
  const RationalFunction nu = node_function(w.preamble());
  const RationalFunction pu = product_function(w.preamble());
  const RationalFunction nv = node_function(w.period());
  const RationalFunction pv = product_function(w.period());
  const RationalFunction one(1.0);
  RationalFunction denom = one - pv;
  if (denom.is_zero()) throw InputError("degenerate period: letter product identically 1");
  return nu + pu * (nv - one) / denom;
}

RationalFunction Family::relation_defect(const Relation& r) const {
  return tip_function(r.left) - tip_function(r.right);
}

double Family::verify_identities(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double worst = 0.0;
  int accepted = 0;
  int attempts = 0;
  while (accepted < samples) {
    if (++attempts > kRejectionCap)
      throw DomainError("no admissible parameters found by rejection sampling");
    const cplx z{coord(rng), coord(rng)};
    const auto alphabet = evaluate(z);
    if (!alphabet) continue;
    ++accepted;
    for (const Relation& r : relations_)
      worst = std::max(worst, relation_residual(r, *alphabet));
  }
  return worst;
}

namespace {

RationalFunction rf(std::vector<cplx> num, std::vector<cplx> den) {
  return RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

Relation rel(const std::string& a, const std::string& b) {
  return Relation(EpWord::parse(a), EpWord::parse(b));
}

}  // namespace

const std::vector<std::string>& Family::preset_names() {
  static const std::vector<std::string> names = {
      "ternary-up", "ternary-down", "binary-b1", "binary-b2",
      "binary-b3",  "plusminus",    "conjugate", "ngon"};
  return names;
}

Family Family::preset(const std::string& name, int ngon_order) {
  const RationalFunction z = RationalFunction::variable();
  if (name == "ternary-up") {
    return Family({{z}, {rf({0.5}, {1.0})}, {rf({0.25}, {cplx{}, 1.0})}},
                  {rel("13~2", "21~2"), rel("31~2", "23~2")}, name);
  }
  if (name == "ternary-down") {
    return Family({{z}, {rf({-0.5}, {1.0})}, {rf({0.25}, {cplx{}, 1.0})}},
                  {rel("12~31", "22~13"), rel("32~13", "22~31")}, name);
  }
  if (name == "binary-b1") {
    return Family({{z}, {rf({1.0, 0.0, 1.0}, {1.0})}}, {rel("1111~2", "211~2")}, name);
  }
  if (name == "binary-b2") {
    // z + 1/(1+z) = (z^2 + z + 1) / (1 + z)
    return Family({{z}, {rf({1.0, 1.0, 1.0}, {1.0, 1.0})}}, {rel("111~2", "211~2")}, name);
  }
  if (name == "binary-b3") {
    return Family({{z}, {rf({1.0, 1.0, 1.0}, {1.0})}}, {rel("111~2", "21~2")}, name);
  }
  if (name == "plusminus") {
    return Family({{z}, {rf({cplx{}, -1.0}, {1.0})}}, {}, name);
  }
  if (name == "conjugate") {
    return Family({{z}, {RationalFunction::variable(), true}}, {}, name);
  }
  if (name == "ngon") {
    if (ngon_order < 2 || ngon_order > 64) throw InputError("ngon order must be in 2..64");
    std::vector<FamilyLetter> letters;
    for (int k = 1; k <= ngon_order; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / ngon_order;
      letters.push_back({rf({cplx{}, std::polar(1.0, angle)}, {1.0})});
    }
    return Family(std::move(letters), {}, "ngon:" + std::to_string(ngon_order));
  }
  throw InputError("unknown preset: " + name);
}

namespace {

using nlohmann::json;

json complex_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json poly_to_json(const Polynomial& p) {
  json arr = json::array();
  for (const cplx& c : p.coeffs()) arr.push_back(complex_to_json(c));
  return arr;
}

Polynomial poly_from_json(const json& j) {
  std::vector<cplx> coeffs;
  for (const auto& item : j) coeffs.push_back(complex_from_json(item));
  return Polynomial(std::move(coeffs));
}

json word_to_json(const Word& w) { return json(w.symbols); }

Word word_from_json(const json& j) { return Word(j.get<std::vector<int>>()); }

json epword_to_json(const EpWord& w) {
  return json{{"pre", word_to_json(w.preamble())}, {"per", word_to_json(w.period())}};
}

EpWord epword_from_json(const json& j) {
  return EpWord(word_from_json(j.at("pre")), word_from_json(j.at("per")));
}

}  // namespace

Family Family::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  const int n = j.at("n").get<int>();
  std::vector<FamilyLetter> letters;
  for (const auto& lj : j.at("letters")) {
    FamilyLetter l{RationalFunction(poly_from_json(lj.at("num")), poly_from_json(lj.at("den"))),
                   lj.value("conjugate", false)};
    letters.push_back(std::move(l));
  }
  if (static_cast<int>(letters.size()) != n)
    throw InputError("family JSON: n does not match the letter count");
  std::vector<Relation> relations;
  if (j.contains("relations"))
    for (const auto& rj : j.at("relations"))
      relations.emplace_back(epword_from_json(rj.at("left")), epword_from_json(rj.at("right")));
  return Family(std::move(letters), std::move(relations), j.value("label", std::string{}));
}

Family Family::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open family file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Family::to_json_text() const {
  json j;
  j["n"] = size();
  j["letters"] = json::array();
  for (const FamilyLetter& l : letters_) {
    j["letters"].push_back({{"num", poly_to_json(l.fn.num())},
                            {"den", poly_to_json(l.fn.den())},
                            {"conjugate", l.conjugate}});
  }
  j["relations"] = json::array();
  for (const Relation& r : relations_)
    j["relations"].push_back({{"left", epword_to_json(r.left)}, {"right", epword_to_json(r.right)}});
  if (!label_.empty()) j["label"] = label_;
  return j.dump(2) + "\n";
}

void Family::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write family file: " + path);
  out << to_json_text();
}

}  // namespace ctrees
