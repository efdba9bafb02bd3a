#include "ctrees/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace ctrees {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }

  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const {
    return static_cast<std::size_t>(p.first) * 0x9e3779b97f4a7c15ULL ^
           static_cast<std::size_t>(p.second);
  }
};

using CellMap =
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::uint32_t>, CellHash>;

std::pair<std::int64_t, std::int64_t> cell_of(cplx z, double h) {
  return {static_cast<std::int64_t>(std::floor(z.real() / h)),
          static_cast<std::int64_t>(std::floor(z.imag() / h))};
}

bool disks_touch(const Disk& a, const Disk& b) {
  const double gap = a.radius + b.radius;
  return std::abs(a.center - b.center) <= gap + 1e-12 * (1.0 + gap);
}

// Union-find over the cover graph, with the spatial hash keeping the pair
// tests local.  Cell size must be at least the largest radius sum.
void link_touching(const std::vector<Disk>& disks, double cell, UnionFind& uf) {
  CellMap grid;
  for (std::uint32_t i = 0; i < disks.size(); ++i) {
    const auto c = cell_of(disks[i].center, cell);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({c.first + dx, c.second + dy});
        if (it == grid.end()) continue;
        for (const std::uint32_t j : it->second)
          if (disks_touch(disks[i], disks[j])) uf.unite(static_cast<int>(i), static_cast<int>(j));
      }
    }
    grid[c].push_back(i);
  }
}

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

DiskCover disk_cover(const Alphabet& a, int level, std::uint64_t budget) {
  if (level < 1) throw InputError("cover level must be >= 1");
  const int n = a.size();
  if (level > 40 || ipow(static_cast<std::uint64_t>(n), level) > budget)
    throw BudgetError("cover of level " + std::to_string(level) + " exceeds the disk budget");

  const double R = a.bounding_radius();
  DiskCover cover;
  cover.level = level;
  cover.alphabet_size = n;
  cover.disks.reserve(ipow(static_cast<std::uint64_t>(n), level));

  // Iterative product walk in lexicographic order; node and scale are
  // maintained incrementally per depth.
  std::vector<int> word(static_cast<std::size_t>(level), 1);
  std::vector<cplx> node(static_cast<std::size_t>(level) + 1);
  std::vector<cplx> prod(static_cast<std::size_t>(level) + 1);
  node[0] = cplx{1.0, 0.0};
  prod[0] = cplx{1.0, 0.0};
  std::uint64_t index = 0;
  for (;;) {
    for (int d = 0; d < level; ++d) {
      const cplx c = a.letter(word[static_cast<std::size_t>(d)]);
      prod[static_cast<std::size_t>(d) + 1] = prod[static_cast<std::size_t>(d)] * c;
      node[static_cast<std::size_t>(d) + 1] =
          node[static_cast<std::size_t>(d)] + prod[static_cast<std::size_t>(d) + 1];
    }
    cover.disks.push_back(
        {node[static_cast<std::size_t>(level)],
         std::abs(prod[static_cast<std::size_t>(level)]) * R, index});
    ++index;
    int d = level - 1;
    while (d >= 0 && word[static_cast<std::size_t>(d)] == n) {
      word[static_cast<std::size_t>(d)] = 1;
      --d;
    }
    if (d < 0) break;
    ++word[static_cast<std::size_t>(d)];
  }
  return cover;
}

Word cover_word(const DiskCover& cover, std::uint64_t index) {
  std::vector<int> symbols(static_cast<std::size_t>(cover.level));
  const auto n = static_cast<std::uint64_t>(cover.alphabet_size);
  for (int d = cover.level - 1; d >= 0; --d) {
    symbols[static_cast<std::size_t>(d)] = static_cast<int>(index % n) + 1;
    index /= n;
  }
  return Word(std::move(symbols));
}

std::string to_string(CertKind kind) {
  switch (kind) {
    case CertKind::Connected: return "connected";
    case CertKind::Disconnected: return "disconnected";
    case CertKind::Excluded: return "excluded";
    case CertKind::NotExcluded: return "not-excluded";
    case CertKind::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string Certificate::to_json_text() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["level"] = level;
  // Groups of 1-based letters, e.g. [[1],[2,3]]; empty when no partition was found.
  nlohmann::json groups = nlohmann::json::array();
  if (!partition.empty()) {
    const int count = 1 + *std::max_element(partition.begin(), partition.end());
    for (int g = 0; g < count; ++g) {
      nlohmann::json members = nlohmann::json::array();
      for (std::size_t i = 0; i < partition.size(); ++i)
        if (partition[i] == g) members.push_back(i + 1);
      groups.push_back(std::move(members));
    }
  }
  j["partition"] = std::move(groups);
  if (witness.has_value())
    j["witness"] = {{"pre", witness->symbols}, {"per", nlohmann::json::array()}};
  else
    j["witness"] = nullptr;
  j["low_confidence"] = low_confidence;
  j["note"] = note;
  return j.dump(2) + "\n";
}

Certificate certify_disconnected(const Alphabet& a, int max_level, std::uint64_t budget) {
  const int n = a.size();
  const double R = a.bounding_radius();
  for (int k = 1; k <= max_level; ++k) {
    if (k > 40 || ipow(static_cast<std::uint64_t>(n), k) > budget) break;
    const DiskCover cover = disk_cover(a, k, budget);
    UnionFind uf(cover.disks.size());
    link_touching(cover.disks, 2.0 * R * std::pow(a.contraction(), k) + 1e-12, uf);

    // Letters in the same disk component must stay in the same group.
    const std::uint64_t block = ipow(static_cast<std::uint64_t>(n), k - 1);
    UnionFind letters(static_cast<std::size_t>(n));
    std::unordered_map<int, int> component_letter;
    for (std::uint32_t i = 0; i < cover.disks.size(); ++i) {
      const int letter = static_cast<int>(cover.disks[i].index / block);
      const int root = uf.find(static_cast<int>(i));
      const auto it = component_letter.find(root);
      if (it == component_letter.end())
        component_letter.emplace(root, letter);
      else
        letters.unite(letter, it->second);
    }

    std::vector<int> group(static_cast<std::size_t>(n), -1);
    int groups = 0;
    for (int j = 0; j < n; ++j) {
      const int root = letters.find(j);
      if (group[static_cast<std::size_t>(root)] == -1)
        group[static_cast<std::size_t>(root)] = groups++;
      group[static_cast<std::size_t>(j)] = group[static_cast<std::size_t>(root)];
    }
    if (groups >= 2) {
      Certificate cert;
      cert.kind = CertKind::Disconnected;
      cert.level = k;
      cert.partition = group;
      cert.note = "level-" + std::to_string(k) + " cover separates the letters into " +
                  std::to_string(groups) + " groups";
      return cert;
    }
  }
  Certificate cert;
  cert.kind = CertKind::Inconclusive;
  cert.level = max_level;
  cert.note = "no separating cover up to level " + std::to_string(max_level);
  return cert;
}

bool letter_graph_connected(int n, const std::vector<Relation>& rels) {
  if (n <= 1) return true;
  UnionFind uf(static_cast<std::size_t>(n));
  for (const Relation& r : rels)
    uf.unite(r.left.first_symbol() - 1, r.right.first_symbol() - 1);
  const int root = uf.find(0);
  for (int j = 1; j < n; ++j)
    if (uf.find(j) != root) return false;
  return true;
}

Certificate escape_membership(const Alphabet& a, cplx target, const EscapeOptions& opt) {
  const double R = a.bounding_radius();
  const double slack = 1e-9 * (1.0 + R);
  Certificate cert;

  struct Node {
    cplx z;
    std::string word;  // symbols as raw bytes, kept in lexicographic order
  };
  std::vector<Node> frontier{{target, ""}};
  const int n = a.size();
  for (int depth = 1; depth <= opt.max_depth; ++depth) {
    std::vector<Node> next;
    std::set<std::pair<std::int64_t, std::int64_t>> grid;
    for (const Node& node : frontier) {
      for (int j = 1; j <= n; ++j) {
        const cplx pulled = (node.z - 1.0) / a.letter(j);
        if (std::abs(pulled - 1.0) > R + slack) continue;
        const std::pair<std::int64_t, std::int64_t> key{
            std::llround(pulled.real() * 1e9), std::llround(pulled.imag() * 1e9)};
        if (!grid.insert(key).second) continue;  // keeps the lex-first representative
        next.push_back({pulled, node.word + static_cast<char>(j)});
        if (next.size() > opt.frontier_cap) {
          cert.kind = CertKind::NotExcluded;
          cert.level = depth;
          cert.low_confidence = true;
          cert.note = "frontier exceeded " + std::to_string(opt.frontier_cap) + " at depth " +
                      std::to_string(depth);
          std::vector<int> symbols(next.front().word.begin(), next.front().word.end());
          cert.witness = Word(std::move(symbols));
          return cert;
        }
      }
    }
    if (next.empty()) {
      cert.kind = CertKind::Excluded;
      cert.level = depth;
      cert.note = "every address prefix escapes by depth " + std::to_string(depth);
      return cert;
    }
    frontier = std::move(next);
  }
  cert.kind = CertKind::NotExcluded;
  cert.level = opt.max_depth;
  cert.note = "an address prefix survives to depth " + std::to_string(opt.max_depth);
  std::vector<int> symbols(frontier.front().word.begin(), frontier.front().word.end());
  cert.witness = Word(std::move(symbols));
  return cert;
}

std::vector<OverlapHit> overlap_localization(const Alphabet& a, int j, int k, int level,
                                             std::uint64_t budget) {
  const int n = a.size();
  if (j < 1 || j > n || k < 1 || k > n || j == k)
    throw InputError("overlap localization needs two distinct letters");
  const DiskCover cover = disk_cover(a, level, budget);
  const std::uint64_t block = ipow(static_cast<std::uint64_t>(n), level - 1);

  std::vector<std::uint32_t> left, right;
  for (std::uint32_t i = 0; i < cover.disks.size(); ++i) {
    const int letter = static_cast<int>(cover.disks[i].index / block) + 1;
    if (letter == j) left.push_back(i);
    if (letter == k) right.push_back(i);
  }

  const double cell = 2.0 * a.bounding_radius() * std::pow(a.contraction(), level) + 1e-12;
  CellMap grid;
  for (const std::uint32_t i : left) grid[cell_of(cover.disks[i].center, cell)].push_back(i);

  std::vector<OverlapHit> hits;
  for (const std::uint32_t i : right) {
    const auto c = cell_of(cover.disks[i].center, cell);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({c.first + dx, c.second + dy});
        if (it == grid.end()) continue;
        for (const std::uint32_t l : it->second) {
          if (!disks_touch(cover.disks[l], cover.disks[i])) continue;
          hits.push_back({cover_word(cover, cover.disks[l].index),
                          cover_word(cover, cover.disks[i].index),
                          0.5 * (cover.disks[l].center + cover.disks[i].center)});
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const OverlapHit& x, const OverlapHit& y) {
    return x.left != y.left ? x.left < y.left : x.right < y.right;
  });
  return hits;
}

Certificate dendrite_consistency(const Alphabet& a, const std::vector<Relation>& rels, int m,
                                 std::uint64_t budget) {
  const int n = a.size();
  const double eps = 4.0 * a.bounding_radius() * std::pow(a.contraction(), m);
  Certificate cert;
  cert.level = m;

  auto fail = [&](std::string why) {
    cert.kind = CertKind::Inconclusive;
    cert.note = std::move(why);
    return cert;
  };

  if (rels.empty()) return fail("no declared relations");
  if (!letter_graph_connected(n, rels)) return fail("declared relations leave the letter graph disconnected");
  for (const Relation& r : rels) {
    const double res = relation_residual(r, a);
    if (res > eps)
      return fail("relation " + r.left.str() + "=" + r.right.str() + " fails (residual " +
                  std::to_string(res) + ")");
  }

  // Claimed touching points per unordered letter pair.
  std::map<std::pair<int, int>, std::vector<cplx>> claimed;
  for (const Relation& r : rels) {
    int j = r.left.first_symbol(), k = r.right.first_symbol();
    if (j > k) std::swap(j, k);
    claimed[{j, k}].push_back(tip_point(r.left, a));
  }

  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const std::vector<OverlapHit> hits = overlap_localization(a, j, k, m, budget);
      const auto it = claimed.find({j, k});
      if (it == claimed.end()) {
        if (!hits.empty())
          return fail("pieces " + std::to_string(j) + " and " + std::to_string(k) +
                      " overlap without a declared relation");
        continue;
      }
      if (hits.empty())
        return fail("pieces " + std::to_string(j) + " and " + std::to_string(k) +
                    " have a declared relation but no overlap at this level");
      for (const OverlapHit& h : hits) {
        double best = 1e300;
        for (const cplx& p : it->second) best = std::min(best, std::abs(h.midpoint - p));
        if (best > eps)
          return fail("overlap of pieces " + std::to_string(j) + "," + std::to_string(k) +
                      " strays from every declared touching point");
      }
    }
  }

  // Each touching point should be a cut point: removing its neighborhood
  // from the cover must split the rest.
  const DiskCover cover = disk_cover(a, m, budget);
  const double cell = 2.0 * a.bounding_radius() * std::pow(a.contraction(), m) + 1e-12;
  for (const auto& [pair, points] : claimed) {
    for (const cplx& p : points) {
      std::vector<Disk> kept;
      for (const Disk& d : cover.disks)
        if (std::abs(d.center - p) > eps) kept.push_back(d);
      if (kept.empty()) return fail("cover vanished around a touching point");
      UnionFind uf(kept.size());
      link_touching(kept, cell, uf);
      std::set<int> roots;
      for (std::uint32_t i = 0; i < kept.size(); ++i) roots.insert(uf.find(static_cast<int>(i)));
      if (roots.size() < 2)
        return fail("touching point near " + std::to_string(p.real()) + "+" +
                    std::to_string(p.imag()) + "i does not separate the cover");
    }
  }

  cert.kind = CertKind::Connected;
  cert.note = "dendrite-consistent: relations hold at tolerance " + std::to_string(eps) +
              ", overlaps localize at the declared touching points, each touching point is a cut point";
  return cert;
}

Certificate connectivity_verdict(const Alphabet& a, const std::vector<Relation>& rels, double tol,
                                 int max_level, std::uint64_t budget) {
  bool relations_hold = !rels.empty() || a.size() == 1;
  for (const Relation& r : rels)
    if (relation_residual(r, a) > tol) {
      relations_hold = false;
      break;
    }
  if (relations_hold && letter_graph_connected(a.size(), rels)) {
    Certificate cert;
    cert.kind = CertKind::Connected;
    cert.note = "declared relations hold and connect the letter graph";
    return cert;
  }
  Certificate cert = certify_disconnected(a, max_level, budget);
  if (cert.kind == CertKind::Disconnected) return cert;
  cert.kind = CertKind::Inconclusive;
  cert.note = "relations do not certify connectivity and no separating cover was found";
  return cert;
}

}  // namespace ctrees
