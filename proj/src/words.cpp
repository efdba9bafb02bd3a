#include "ctrees/words.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctrees {

Alphabet::Alphabet(std::vector<cplx> letters) : letters_(std::move(letters)) {
  if (letters_.size() < 2) throw InputError("alphabet needs at least 2 letters");
  for (const cplx& c : letters_) {
    const double m = std::abs(c);
    if (!std::isfinite(m) || m <= 0.0 || m >= 1.0)
      throw InputError("alphabet letter must satisfy 0 < |c| < 1");
    contraction_ = std::max(contraction_, m);
  }
  for (std::size_t i = 0; i < letters_.size(); ++i)
    for (std::size_t j = i + 1; j < letters_.size(); ++j)
      if (letters_[i] == letters_[j])
        throw InputError("alphabet letters must be pairwise distinct");
}

cplx Alphabet::letter(int symbol) const {
  if (symbol < 1 || symbol > size()) throw InputError("symbol out of range");
  return letters_[static_cast<std::size_t>(symbol - 1)];
}

double Alphabet::bounding_radius() const {
  return contraction_ / (1.0 - contraction_);
}

Word::Word(std::vector<int> s) : symbols(std::move(s)) {
  if (symbols.size() > kMaxWordLength) throw InputError("word too long");
  for (int x : symbols)
    if (x < 1) throw InputError("word symbols are 1-based");
}

Word Word::parse(const std::string& digits) {
  std::vector<int> s;
  s.reserve(digits.size());
  for (char ch : digits) {
    if (ch < '1' || ch > '9') throw InputError("word must be digits 1..9");
    s.push_back(ch - '0');
  }
  return Word(std::move(s));
}

std::string Word::str() const {
  std::string out;
  for (int x : symbols) {
    if (x <= 9) {
      out.push_back(static_cast<char>('0' + x));
    } else {
      out += "(" + std::to_string(x) + ")";
    }
  }
  return out;
}

namespace {

// Shortest q with v = q repeated; always a divisor of |v|.
Word primitive_period(const Word& v) {
  const std::size_t n = v.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i)
      ok = v.symbols[i] == v.symbols[i - d];
    if (ok)
      return Word(std::vector<int>(v.symbols.begin(),
                                   v.symbols.begin() + static_cast<long>(d)));
  }
  return v;
}

}  // namespace

EpWord::EpWord(Word preamble, Word period)
    : pre_(std::move(preamble)), per_(std::move(period)) {
  if (per_.empty()) throw InputError("period must be nonempty");
  per_ = primitive_period(per_);
  // Absorb preamble symbols that merely repeat the tail of the period:
  // u a | (w a) equals u | (a w) as infinite sequences.
  while (!pre_.empty() && pre_.symbols.back() == per_.symbols.back()) {
    pre_.symbols.pop_back();
    per_.symbols.insert(per_.symbols.begin(), per_.symbols.back());
    per_.symbols.pop_back();
  }
}

EpWord EpWord::parse(const std::string& text) {
  const auto tilde = text.find('~');
  if (tilde == std::string::npos)
    throw InputError("eventually periodic word needs '~' before the period");
  return EpWord(Word::parse(text.substr(0, tilde)),
                Word::parse(text.substr(tilde + 1)));
}

int EpWord::first_symbol() const {
  return pre_.empty() ? per_.symbols.front() : pre_.symbols.front();
}

int EpWord::symbol_at(std::size_t i) const {
  if (i < pre_.size()) return pre_.symbols[i];
  return per_.symbols[(i - pre_.size()) % per_.size()];
}

std::string EpWord::str() const { return pre_.str() + "~" + per_.str(); }

Relation::Relation(EpWord a, EpWord b) : left(std::move(a)), right(std::move(b)) {
  if (left.first_symbol() == right.first_symbol())
    throw InputError("relation sides must start with different symbols");
}

Similarity compose(const Similarity& a, const Similarity& b) {
  return {a.node + a.scale * (b.node - 1.0), a.scale * b.scale};
}

Similarity inverse(const Similarity& s) {
  return {1.0 + (1.0 - s.node) / s.scale, 1.0 / s.scale};
}

cplx node_point(const Word& v, const Alphabet& a) {
  cplx acc{1.0, 0.0};
  cplx prod{1.0, 0.0};
  for (int s : v.symbols) {
    prod *= a.letter(s);
    acc += prod;
  }
  return acc;
}

cplx letter_product(const Word& v, const Alphabet& a) {
  cplx prod{1.0, 0.0};
  for (int s : v.symbols) prod *= a.letter(s);
  return prod;
}

cplx tip_point(const EpWord& w, const Alphabet& a) {
  const cplx nu = node_point(w.preamble(), a);
  const cplx pu = letter_product(w.preamble(), a);
  const cplx nv = node_point(w.period(), a);
  const cplx pv = letter_product(w.period(), a);
  return nu + pu * (nv - 1.0) / (1.0 - pv);
}

Similarity similarity_of(const Word& v, const Alphabet& a) {
  return {node_point(v, a), letter_product(v, a)};
}

Similarity neighbor_map(const Word& u, const Word& v, const Alphabet& a) {
  return compose(inverse(similarity_of(u, a)), similarity_of(v, a));
}

double relation_residual(const Relation& r, const Alphabet& a) {
  return std::abs(tip_point(r.left, a) - tip_point(r.right, a));
}

bool pieces_coincide(const Word& u, const Word& v, const Alphabet& a,
                     double tol, int refine_depth) {
  if (u.empty() || v.empty()) throw InputError("pieces need nonempty words");
  const Similarity su = similarity_of(u, a);
  const Similarity sv = similarity_of(v, a);
  if (std::abs(su.node - sv.node) <= tol &&
      std::abs(su.scale - sv.scale) <= tol)
    return true;
  if (refine_depth <= 0) return false;
  // The pieces can still be equal as sets when their child pieces match
  // crosswise; look for a perfect matching of certified-equal children.
  const int n = a.size();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int j = 1; j <= n; ++j) {
    Word uj = u;
    uj.symbols.push_back(j);
    bool matched = false;
    for (int k = 1; k <= n && !matched; ++k) {
      if (used[static_cast<std::size_t>(k - 1)]) continue;
      Word vk = v;
      vk.symbols.push_back(k);
      if (pieces_coincide(uj, vk, a, tol, refine_depth - 1)) {
        used[static_cast<std::size_t>(k - 1)] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

EpWord shift(const EpWord& w) {
  if (!w.preamble().empty()) {
    Word pre = w.preamble();
    pre.symbols.erase(pre.symbols.begin());
    return EpWord(std::move(pre), w.period());
  }
  Word per = w.period();
  per.symbols.push_back(per.symbols.front());
  per.symbols.erase(per.symbols.begin());
  return EpWord(Word{}, std::move(per));
}

std::vector<EpWord> post_critical_set(const std::vector<Relation>& rels) {
  std::set<EpWord> out;
  auto add_orbit = [&out](const EpWord& w) {
    // All distinct shifts appear within |preamble| + |period| steps.
    const std::size_t steps = w.preamble().size() + w.period().size();
    EpWord x = w;
    for (std::size_t i = 0; i < steps; ++i) {
      x = shift(x);
      out.insert(x);
    }
  };
  for (const Relation& r : rels) {
    add_orbit(r.left);
    add_orbit(r.right);
  }
  return {out.begin(), out.end()};
}

}  // namespace ctrees
