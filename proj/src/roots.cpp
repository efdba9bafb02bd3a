#include "ctrees/roots.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "json.hpp"

namespace ctrees {

namespace {

constexpr double kLeadTrim = 1e-14;

// ----- simultaneous root iteration -------------------------------------

struct Guesses {
  double radius_lo, radius_hi, angle_offset;
};

std::vector<cplx> initial_guesses(const std::vector<cplx>& monic, const Guesses& g) {
  const int deg = static_cast<int>(monic.size()) - 1;
  double cauchy = 0.0;
  for (int k = 0; k < deg; ++k) cauchy = std::max(cauchy, std::abs(monic[static_cast<std::size_t>(k)]));
  cauchy += 1.0;
  std::vector<cplx> z(static_cast<std::size_t>(deg));
  for (int k = 0; k < deg; ++k) {
    const double t = deg == 1 ? 0.0 : static_cast<double>(k) / (deg - 1);
    const double radius = cauchy * (g.radius_lo + (g.radius_hi - g.radius_lo) * t);
    const double angle = 2.0 * 3.14159265358979323846 * k / deg + g.angle_offset;
    z[static_cast<std::size_t>(k)] = std::polar(radius, angle);
  }
  return z;
}

// p and p' at z by Horner, plus sum |c_k| |z|^k for a backward-error scale.
void eval_with_derivative(const std::vector<cplx>& c, cplx z, cplx& p, cplx& dp, double& scale) {
  p = cplx{};
  dp = cplx{};
  scale = 0.0;
  const double az = std::abs(z);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
    scale = scale * az + std::abs(*it);
  }
}

bool aberth_pass(const std::vector<cplx>& monic, std::vector<cplx>& z, int max_sweeps, int& sweeps) {
  const std::size_t deg = z.size();
  for (sweeps = 0; sweeps < max_sweeps; ++sweeps) {
    double max_step = 0.0;
    int converged = 0;
    for (std::size_t i = 0; i < deg; ++i) {
      cplx p, dp;
      double scale;
      eval_with_derivative(monic, z[i], p, dp, scale);
      if (std::abs(p) <= 4.0 * 1e-16 * scale) {
        ++converged;
        continue;
      }
      if (dp == cplx{}) {  // stationary point; nudge off it
        z[i] += cplx{1e-8, 1e-8} * (1.0 + std::abs(z[i]));
        max_step = 1.0;
        continue;
      }
      const cplx newton = p / dp;
      cplx repulse{};
      for (std::size_t j = 0; j < deg; ++j) {
        if (j == i) continue;
        cplx d = z[i] - z[j];
        if (std::abs(d) < 1e-300) d = cplx{1e-300, 0.0};
        repulse += 1.0 / d;
      }
      const cplx denom = 1.0 - newton * repulse;
      const cplx step = std::abs(denom) < 1e-300 ? newton : newton / denom;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (converged == static_cast<int>(deg)) return true;
    if (max_step <= 1e-15) return true;
  }
  return false;
}

}  // namespace

RootResult find_polynomial_roots(std::vector<cplx> coeffs, const RootOptions& opt) {
  const std::vector<cplx> original = coeffs;
  double maxc = 0.0;
  for (const cplx& c : coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) throw InputError("root finding needs a nonzero polynomial");
  while (!coeffs.empty() && std::abs(coeffs.back()) <= kLeadTrim * maxc) coeffs.pop_back();
  if (coeffs.size() < 2) throw InputError("root finding needs degree >= 1");

  RootResult result;
  // Exact zero roots peel off first so the iteration sees a nonzero constant term.
  while (coeffs.size() > 1 && std::abs(coeffs.front()) <= kLeadTrim * maxc) {
    result.roots.push_back(cplx{});
    coeffs.erase(coeffs.begin());
  }

  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg == 1) {
    result.roots.push_back(-coeffs[0] / coeffs[1]);
  } else if (deg == 2) {
    const cplx a = coeffs[2], b = coeffs[1], c = coeffs[0];
    cplx s = std::sqrt(b * b - 4.0 * a * c);
    if (std::abs(b + s) < std::abs(b - s)) s = -s;
    const cplx q = -0.5 * (b + s);
    const cplx r1 = q / a;
    result.roots.push_back(r1);
    result.roots.push_back(std::abs(q) > 0.0 ? c / q : -r1 - b / a);
  } else if (deg >= 3) {
    std::vector<cplx> monic = coeffs;
    const cplx lead = monic.back();
    for (cplx& x : monic) x /= lead;
    const Guesses attempts[] = {{0.45, 1.0, 0.4}, {0.25, 1.3, 1.9}};
    std::vector<cplx> z;
    bool done = false;
    for (const Guesses& g : attempts) {
      z = initial_guesses(monic, g);
      done = aberth_pass(monic, z, opt.max_sweeps, result.sweeps);
      if (done) break;
    }
    result.roots.insert(result.roots.end(), z.begin(), z.end());
  }

  std::sort(result.roots.begin(), result.roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  const Polynomial p(original);
  result.residuals.reserve(result.roots.size());
  for (const cplx& r : result.roots) {
    const double res = std::abs(p.eval(r));
    const double bound =
        opt.residual_factor * maxc * std::pow(1.0 + std::abs(r), static_cast<double>(p.degree()));
    if (!(res <= bound))
      throw RootSolveError("root iteration did not reach the residual bound (|p| = " +
                           std::to_string(res) + ")");
    result.residuals.push_back(res);
  }
  return result;
}

std::vector<std::pair<cplx, int>> cluster_roots(const std::vector<cplx>& roots, double radius) {
  std::vector<cplx> sorted = roots;
  std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<std::pair<cplx, int>> out;
  for (const cplx& r : sorted) {
    bool merged = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (r.real() - it->first.real() > radius) break;
      if (std::abs(r - it->first) <= radius) {
        ++it->second;
        merged = true;
        break;
      }
    }
    if (!merged) out.emplace_back(r, 1);
  }
  return out;
}

// ----- cloud machinery ---------------------------------------------------

namespace {

struct Tip {
  EpWord word;
  std::vector<cplx> num, den;
  double num_max, den_max;
  int first;
};

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return p.first ^ (p.second * 0x9e3779b97f4a7c15ULL);
  }
};

std::uint64_t fnv_step(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Scale-invariant fingerprint of a coefficient vector: normalize by the
// largest coefficient, quantize to a 1e-9 grid, hash twice.
std::pair<std::uint64_t, std::uint64_t> coeff_key(const std::vector<cplx>& c, std::size_t n) {
  std::size_t imax = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::abs(c[k]);
    if (m > best) {
      best = m;
      imax = k;
    }
  }
  const cplx inv = 1.0 / c[imax];
  std::uint64_t h1 = 0xcbf29ce484222325ULL;
  std::uint64_t h2 = 0x84222325cbf29ce4ULL;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx v = c[k] * inv;
    const auto qr = static_cast<std::int64_t>(std::llround(v.real() * 1e9));
    const auto qi = static_cast<std::int64_t>(std::llround(v.imag() * 1e9));
    h1 = fnv_step(fnv_step(h1, static_cast<std::uint64_t>(qr)), static_cast<std::uint64_t>(qi));
    h2 = fnv_step(fnv_step(h2, static_cast<std::uint64_t>(qi) * 0x9e3779b97f4a7c15ULL),
                  static_cast<std::uint64_t>(qr) + 0xbf58476d1ce4e5b9ULL);
  }
  return {h1, h2};
}

// defect numerator num_a * den_b - num_b * den_a, written into out.
// Returns the coefficient count (trailing entries beyond it are stale).
std::size_t cross_defect(const Tip& a, const Tip& b, std::vector<cplx>& out) {
  const std::size_t n = std::max(a.num.size() + b.den.size(), b.num.size() + a.den.size()) - 1;
  out.assign(n, cplx{});
  for (std::size_t i = 0; i < a.num.size(); ++i)
    for (std::size_t j = 0; j < b.den.size(); ++j) out[i + j] += a.num[i] * b.den[j];
  for (std::size_t i = 0; i < b.num.size(); ++i)
    for (std::size_t j = 0; j < a.den.size(); ++j) out[i + j] -= b.num[i] * a.den[j];
  return n;
}

struct WorkItem {
  std::uint32_t a = 0, b = 0;  // tip indices; b == UINT32_MAX marks stored coefficients
  std::vector<cplx> coeffs;    // used by the equation clouds
  std::string provenance;
};

struct RawPoint {
  cplx z;
  double residual;
};

// Runs find_polynomial_roots over the work list on opt.workers threads.
// results[i] depends only on item i, so the merge is scheduling-independent.
void extract_roots(const Family& fam, const std::vector<Tip>& tips,
                   const std::vector<WorkItem>& work, const CloudOptions& opt,
                   std::vector<std::vector<RawPoint>>& results, std::vector<int>& degrees) {
  results.assign(work.size(), {});
  degrees.assign(work.size(), 0);
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto run = [&]() {
    std::vector<cplx> scratch;
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= work.size() || failed.load()) break;
      const WorkItem& item = work[i];
      std::vector<cplx> coeffs;
      if (item.b == UINT32_MAX) {
        coeffs = item.coeffs;
      } else {
        const std::size_t n = cross_defect(tips[item.a], tips[item.b], scratch);
        coeffs.assign(scratch.begin(), scratch.begin() + static_cast<long>(n));
      }
      double maxc = 0.0;
      for (const cplx& c : coeffs) maxc = std::max(maxc, std::abs(c));
      while (!coeffs.empty() && std::abs(coeffs.back()) <= kLeadTrim * maxc) coeffs.pop_back();
      if (coeffs.size() < 2) continue;
      degrees[i] = static_cast<int>(coeffs.size()) - 1;
      try {
        const RootResult rr = find_polynomial_roots(coeffs);
        for (std::size_t k = 0; k < rr.roots.size(); ++k) {
          if (fam.evaluate(rr.roots[k]).has_value())
            results[i].push_back({rr.roots[k], rr.residuals[k]});
        }
      } catch (const RootSolveError& e) {
        const std::string where = item.b == UINT32_MAX
                                      ? item.provenance
                                      : tips[item.a].word.str() + "=" + tips[item.b].word.str();
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error_message = std::string(e.what()) + " [" + where + "]";
      }
    }
  };

  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw RootSolveError(error_message);
}

RootCloud assemble_cloud(const std::vector<std::vector<RawPoint>>& results,
                         const std::vector<int>& degrees,
                         const std::vector<std::string>& provenance, double cluster_radius) {
  struct Entry {
    cplx z;
    double residual;
    std::uint32_t item;
  };
  std::vector<Entry> all;
  for (std::size_t i = 0; i < results.size(); ++i)
    for (const RawPoint& p : results[i])
      all.push_back({p.z, p.residual, static_cast<std::uint32_t>(i)});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
    return a.item < b.item;
  });
  RootCloud cloud;
  for (const Entry& e : all) {
    bool merged = false;
    for (auto it = cloud.points.rbegin(); it != cloud.points.rend(); ++it) {
      if (e.z.real() - it->z.real() > cluster_radius) break;
      if (std::abs(e.z - it->z) <= cluster_radius) {
        merged = true;
        break;
      }
    }
    if (!merged)
      cloud.points.push_back({e.z, degrees[e.item], e.residual, provenance[e.item]});
  }
  return cloud;
}

std::vector<cplx> rf_vec(const Polynomial& p) {
  return p.is_zero() ? std::vector<cplx>{cplx{}} : p.coeffs();
}

}  // namespace

std::vector<Word> default_tails(const Family& fam) {
  std::set<Word> periods;
  for (const Relation& r : fam.relations()) {
    periods.insert(r.left.period());
    periods.insert(r.right.period());
  }
  if (periods.empty())
    for (int j = 1; j <= fam.size(); ++j) periods.insert(Word({j}));
  return {periods.begin(), periods.end()};
}

RootCloud relation_root_cloud(const Family& fam, int level, std::vector<Word> tails,
                              const CloudOptions& opt) {
  if (!fam.symbolic())
    throw ConjugateFamilyError("relation clouds need a conjugation-free family");
  if (level < 1) throw InputError("cloud level must be >= 1");
  if (tails.empty()) tails = default_tails(fam);
  const int n = fam.size();

  // Closing factor (node(t) - 1) / (1 - prod(t)) for each tail period.
  std::vector<RationalFunction> closing;
  for (const Word& t : tails) {
    if (t.empty()) throw InputError("tail period must be nonempty");
    const RationalFunction nt = fam.node_function(t);
    const RationalFunction pt = fam.product_function(t);
    RationalFunction denom = RationalFunction(1.0) - pt;
    if (denom.is_zero()) throw InputError("degenerate tail: letter product identically 1");
    closing.push_back((nt - RationalFunction(1.0)) / denom);
  }

  // Enumerate addresses w|t, |w| <= level, deduplicated by canonical form.
  std::vector<Tip> tips;
  std::set<EpWord> seen;
  Word w;
  auto visit = [&](auto&& self) -> void {
    if (!w.empty()) {
      const RationalFunction node = fam.node_function(w);
      const RationalFunction prod = fam.product_function(w);
      for (std::size_t t = 0; t < tails.size(); ++t) {
        EpWord key(w, tails[t]);
        if (!seen.insert(key).second) continue;
        const RationalFunction tip = node + prod * closing[t];
        tips.push_back(Tip{key, rf_vec(tip.num()), rf_vec(tip.den()),
                           tip.num().max_abs_coeff(), tip.den().max_abs_coeff(),
                           key.first_symbol()});
      }
    }
    if (static_cast<int>(w.size()) == level) return;
    for (int j = 1; j <= n; ++j) {
      w.symbols.push_back(j);
      self(self);
      w.symbols.pop_back();
    }
  };
  visit(visit);

  std::vector<std::vector<std::uint32_t>> groups(static_cast<std::size_t>(n) + 1);
  for (std::uint32_t i = 0; i < tips.size(); ++i)
    groups[static_cast<std::size_t>(tips[i].first)].push_back(i);

  std::uint64_t total_pairs = 0;
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k)
      total_pairs += static_cast<std::uint64_t>(groups[static_cast<std::size_t>(j)].size()) *
                     groups[static_cast<std::size_t>(k)].size();
  if (total_pairs > opt.pair_budget)
    throw BudgetError("tip pair count " + std::to_string(total_pairs) +
                      " exceeds the pair budget " + std::to_string(opt.pair_budget));

  std::set<std::pair<EpWord, EpWord>> declared;
  if (opt.exclude_declared)
    for (const Relation& r : fam.relations()) {
      declared.emplace(r.left, r.right);
      declared.emplace(r.right, r.left);
    }

  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> keys;
  std::vector<WorkItem> work;
  std::vector<cplx> scratch;
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      for (const std::uint32_t ia : groups[static_cast<std::size_t>(j)]) {
        for (const std::uint32_t ib : groups[static_cast<std::size_t>(k)]) {
          const Tip& a = tips[ia];
          const Tip& b = tips[ib];
          if (!declared.empty() && declared.count({a.word, b.word})) continue;
          const std::size_t nc = cross_defect(a, b, scratch);
          double maxc = 0.0;
          for (std::size_t q = 0; q < nc; ++q) maxc = std::max(maxc, std::abs(scratch[q]));
          const double ref = a.num_max * b.den_max + b.num_max * a.den_max;
          if (maxc <= 1e-12 * ref) continue;  // tips identical across the family
          if (!keys.insert(coeff_key(scratch, nc)).second) continue;
          WorkItem item;
          item.a = ia;
          item.b = ib;
          work.push_back(std::move(item));
        }
      }
    }
  }

  std::vector<std::string> provenance;
  provenance.reserve(work.size());
  for (const WorkItem& item : work)
    provenance.push_back(tips[item.a].word.str() + "=" + tips[item.b].word.str());

  std::vector<std::vector<RawPoint>> results;
  std::vector<int> degrees;
  extract_roots(fam, tips, work, opt, results, degrees);
  return assemble_cloud(results, degrees, provenance, opt.cluster_radius);
}

RootCloud root_connectivity_cloud(const Family& fam, int order, std::vector<Word> tails,
                                  const CloudOptions& opt) {
  if (!fam.symbolic())
    throw ConjugateFamilyError("connectivity clouds need a conjugation-free family");
  if (order < 1) throw InputError("cloud order must be >= 1");
  if (tails.empty()) tails = default_tails(fam);
  const int n = fam.size();

  std::vector<RationalFunction> closing;
  for (const Word& t : tails) {
    const RationalFunction nt = fam.node_function(t);
    const RationalFunction pt = fam.product_function(t);
    RationalFunction denom = RationalFunction(1.0) - pt;
    if (denom.is_zero()) throw InputError("degenerate tail: letter product identically 1");
    closing.push_back((nt - RationalFunction(1.0)) / denom);
  }

  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> keys;
  std::vector<WorkItem> work;
  std::set<EpWord> seen;
  std::uint64_t equations = 0;
  auto push_equation = [&](std::vector<cplx> coeffs, std::string label) {
    if (++equations > opt.pair_budget)
      throw BudgetError("equation count exceeds the budget " + std::to_string(opt.pair_budget));
    double maxc = 0.0;
    for (const cplx& c : coeffs) maxc = std::max(maxc, std::abs(c));
    if (maxc == 0.0) return;
    if (!keys.insert(coeff_key(coeffs, coeffs.size())).second) return;
    WorkItem item;
    item.b = UINT32_MAX;
    item.coeffs = std::move(coeffs);
    item.provenance = std::move(label);
    work.push_back(std::move(item));
  };

  Word w;
  auto visit = [&](auto&& self) -> void {
    if (!w.empty()) push_equation(rf_vec(fam.node_function(w).num()), "node " + w.str());
    const RationalFunction node = fam.node_function(w);
    const RationalFunction prod = fam.product_function(w);
    for (std::size_t t = 0; t < tails.size(); ++t) {
      EpWord key = w.empty() ? EpWord(Word{}, tails[t]) : EpWord(w, tails[t]);
      if (!seen.insert(key).second) continue;
      const RationalFunction tip = node + prod * closing[t];
      push_equation(rf_vec(tip.num()), "tip " + key.str());
    }
    if (static_cast<int>(w.size()) == order) return;
    for (int j = 1; j <= n; ++j) {
      w.symbols.push_back(j);
      self(self);
      w.symbols.pop_back();
    }
  };
  visit(visit);

  std::vector<std::string> provenance;
  provenance.reserve(work.size());
  for (const WorkItem& item : work) provenance.push_back(item.provenance);

  std::vector<Tip> no_tips;
  std::vector<std::vector<RawPoint>> results;
  std::vector<int> degrees;
  extract_roots(fam, no_tips, work, opt, results, degrees);
  return assemble_cloud(results, degrees, provenance, opt.cluster_radius);
}

void write_cloud_csv(const RootCloud& cloud, std::ostream& out) {
  out << "re,im,degree,residual,provenance\n";
  char buf[128];
  for (const CloudPoint& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.6e,", p.z.real(), p.z.imag(), p.degree,
                  p.residual);
    out << buf << p.provenance << "\n";
  }
}

void write_cloud_csv_file(const RootCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write cloud file: " + path);
  write_cloud_csv(cloud, out);
}

std::string cloud_json_text(const RootCloud& cloud) {
  nlohmann::json points = nlohmann::json::array();
  for (const CloudPoint& p : cloud.points)
    points.push_back({{"re", p.z.real()},
                      {"im", p.z.imag()},
                      {"degree", p.degree},
                      {"residual", p.residual},
                      {"provenance", p.provenance}});
  return nlohmann::json{{"points", points}}.dump(2) + "\n";
}

void write_cloud_json_file(const RootCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write cloud file: " + path);
  out << cloud_json_text(cloud);
}

}  // namespace ctrees
