#include "ctrees/connectivity.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

using namespace ctrees;
using ctrees::testing::random_alphabet;
using ctrees::testing::random_epword;

namespace {

const Alphabet kTernary({cplx(0.0, 0.5), cplx(0.5, 0.0), cplx(0.0, -0.5)});
const Alphabet kTiny({cplx(0.1), cplx(-0.1)});

Alphabet sierpinski() {
  const double s3 = std::sqrt(3.0);
  return Alphabet({cplx(-0.25, s3 / 4.0), cplx(0.5), cplx(-0.25, -s3 / 4.0)});
}

// Mirrors the escape test without pruning shortcuts: true iff every length-d
// pullback chain of the target leaves the bounding disk at some step <= d.
bool exhaustively_excluded(const Alphabet& a, cplx target, int depth) {
  const double limit = a.bounding_radius() + 1e-9 * (1.0 + a.bounding_radius());
  std::vector<cplx> frontier{target};
  for (int d = 0; d < depth; ++d) {
    std::vector<cplx> next;
    for (const cplx p : frontier)
      for (int j = 1; j <= a.size(); ++j) {
        const cplx pulled = (p - 1.0) / a.letter(j);
        if (std::abs(pulled - 1.0) <= limit) next.push_back(pulled);
      }
    if (next.empty()) return true;
    frontier = std::move(next);
  }
  return false;
}

}  // namespace

TEST_CASE("disk cover geometry") {
  const DiskCover tiny = disk_cover(kTiny, 1);
  REQUIRE(tiny.disks.size() == 2);
  CHECK(std::abs(tiny.disks[0].center - cplx(1.1)) < 1e-15);
  CHECK(std::abs(tiny.disks[1].center - cplx(0.9)) < 1e-15);
  CHECK(tiny.disks[0].radius == doctest::Approx(1.0 / 90.0));

  const DiskCover nine = disk_cover(kTernary, 2);
  REQUIRE(nine.disks.size() == 9);
  for (const Disk& d : nine.disks) CHECK(d.radius == doctest::Approx(0.25));

  CHECK_THROWS_AS(disk_cover(kTernary, 10, 100), BudgetError);
}

TEST_CASE("covers nest level by level") {
  std::mt19937_64 rng(17);
  const Alphabet a = random_alphabet(rng, 3, 0.7);
  const DiskCover parent = disk_cover(a, 2);
  const DiskCover child = disk_cover(a, 3);
  for (const Disk& d : child.disks) {
    const Disk& up = parent.disks[static_cast<std::size_t>(d.index / 3)];
    CHECK(std::abs(d.center - up.center) + d.radius <= up.radius + 1e-12);
  }
}

TEST_CASE("disk indices decode to their words") {
  const DiskCover cover = disk_cover(kTernary, 3);
  CHECK(cover_word(cover, 0) == Word::parse("111"));
  CHECK(cover_word(cover, 5) == Word::parse("123"));
  CHECK(cover_word(cover, 26) == Word::parse("333"));
  for (const std::uint64_t i : {0ull, 7ull, 13ull, 26ull}) {
    const Word w = cover_word(cover, i);
    CHECK(std::abs(cover.disks[i].center - node_point(w, kTernary)) < 1e-14);
  }
}

TEST_CASE("separated pieces are certified with a letter partition") {
  const Certificate cert = certify_disconnected(kTiny);
  REQUIRE(cert.kind == CertKind::Disconnected);
  CHECK(cert.level == 1);
  REQUIRE(cert.partition.size() == 2);
  CHECK(cert.partition[0] != cert.partition[1]);

  // Independent of the union-find: disks of distinct groups never touch.
  const DiskCover cover = disk_cover(kTiny, cert.level);
  for (const Disk& x : cover.disks)
    for (const Disk& y : cover.disks) {
      const int gx = cert.partition[static_cast<std::size_t>(cover_word(cover, x.index).symbols[0] - 1)];
      const int gy = cert.partition[static_cast<std::size_t>(cover_word(cover, y.index).symbols[0] - 1)];
      if (gx != gy) CHECK(std::abs(x.center - y.center) > x.radius + y.radius);
    }
}

TEST_CASE("touching pieces stay unresolved by disk separation") {
  const Certificate cert = certify_disconnected(kTernary, 6);
  CHECK(cert.kind == CertKind::Inconclusive);
}

TEST_CASE("letter graph connectivity") {
  const Family up = Family::preset("ternary-up");
  CHECK(letter_graph_connected(3, up.relations()));
  CHECK(letter_graph_connected(1, {}));
  CHECK_FALSE(letter_graph_connected(2, {}));
  const std::vector<Relation> one{Relation(EpWord::parse("1~2"), EpWord::parse("2~1"))};
  CHECK_FALSE(letter_graph_connected(3, one));
}

TEST_CASE("escape test certifies exclusion at pullback depth") {
  const Certificate cert = escape_membership(kTiny, cplx(0.0));
  CHECK(cert.kind == CertKind::Excluded);
  CHECK(cert.level == 1);
}

TEST_CASE("excluded verdicts agree with exhaustive pullback enumeration") {
  const Alphabet a({cplx(0.45, 0.3), cplx(-0.45, -0.3)});
  int excluded = 0;
  for (const cplx target : {cplx(0.0), cplx(-0.4, 0.2), cplx(3.0, 0.0), cplx(0.8, 0.5)}) {
    EscapeOptions opt;
    opt.max_depth = 10;
    const Certificate cert = escape_membership(a, target, opt);
    if (cert.kind == CertKind::Excluded) {
      ++excluded;
      CHECK(exhaustively_excluded(a, target, cert.level));
    }
  }
  CHECK(excluded >= 1);
}

TEST_CASE("true tips are never excluded") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Alphabet a = random_alphabet(rng, 2 + trial % 2, 0.6);
    const cplx target = tip_point(random_epword(rng, a.size()), a);
    EscapeOptions opt;
    opt.max_depth = 14;
    opt.frontier_cap = 100000;
    const Certificate cert = escape_membership(a, target, opt);
    CHECK(cert.kind == CertKind::NotExcluded);
    REQUIRE(cert.witness.has_value());
    CHECK_FALSE(cert.witness->empty());
  }
}

TEST_CASE("overlap localization separates touching pairs from disjoint ones") {
  CHECK(overlap_localization(kTiny, 1, 2, 1).empty());

  CHECK(overlap_localization(kTernary, 1, 3, 6).empty());
  const auto left = overlap_localization(kTernary, 1, 2, 6);
  const auto right = overlap_localization(kTernary, 2, 3, 6);
  CHECK_FALSE(left.empty());
  CHECK_FALSE(right.empty());
  for (const OverlapHit& h : left) {
    CHECK(h.left.symbols.front() == 1);
    CHECK(h.right.symbols.front() == 2);
  }

  const Alphabet gasket = sierpinski();
  CHECK_FALSE(overlap_localization(gasket, 1, 2, 6).empty());
  CHECK_FALSE(overlap_localization(gasket, 1, 3, 6).empty());
  CHECK_FALSE(overlap_localization(gasket, 2, 3, 6).empty());

  CHECK_THROWS_AS(overlap_localization(kTernary, 1, 1, 3), InputError);
  CHECK_THROWS_AS(overlap_localization(kTernary, 0, 2, 3), InputError);
}

TEST_CASE("dendrite consistency accepts a single-touching-point tree") {
  const Alphabet a({cplx(0.053, 0.21), cplx(-0.23, 0.566), cplx(0.5, 0.3)});
  const std::vector<Relation> rels{
      Relation(EpWord::parse("222~3"), EpWord::parse("1~3")),
      Relation(EpWord::parse("1~3"), EpWord::parse("32~3")),
      Relation(EpWord::parse("222~3"), EpWord::parse("32~3")),
  };
  const Certificate cert = dendrite_consistency(a, rels, 8);
  CHECK(cert.kind == CertKind::Connected);

  // The three pieces all meet near the closure of 2223333...
  const cplx x = tip_point(EpWord::parse("222~3"), a);
  CHECK(std::abs(x - cplx(0.89, 0.35)) < 0.01);
}

TEST_CASE("dendrite consistency stays inconclusive on segment overlaps") {
  const Family up = Family::preset("ternary-up");
  const Certificate cert = dendrite_consistency(kTernary, up.relations(), 8);
  CHECK(cert.kind == CertKind::Inconclusive);
}

TEST_CASE("dendrite consistency needs relations") {
  const Certificate cert = dendrite_consistency(kTiny, {}, 4);
  CHECK(cert.kind == CertKind::Inconclusive);
}

TEST_CASE("combined verdict prefers verified relations, then separation") {
  const Family up = Family::preset("ternary-up");
  const Certificate conn = connectivity_verdict(kTernary, up.relations());
  CHECK(conn.kind == CertKind::Connected);

  const Certificate disc = connectivity_verdict(kTiny, {});
  CHECK(disc.kind == CertKind::Disconnected);

  // The declared coincidences hold across the whole family, so they also
  // certify the corner-touching alphabet.
  const Certificate gasket = connectivity_verdict(sierpinski(), up.relations());
  CHECK(gasket.kind == CertKind::Connected);

  // Relations that fail numerically cannot certify anything here.
  const Alphabet other({cplx(0.3), cplx(0.0, 0.4), cplx(-0.3)});
  const Certificate inc = connectivity_verdict(other, up.relations(), 1e-9, 4);
  CHECK(inc.kind != CertKind::Connected);
}

TEST_CASE("certificates serialize with letter groups and witness address") {
  Certificate cert;
  cert.kind = CertKind::Disconnected;
  cert.level = 2;
  cert.partition = {0, 1, 0};
  const std::string text = cert.to_json_text();
  CHECK(text.find("\"disconnected\"") != std::string::npos);
  CHECK(text.find("[\n      1,\n      3\n    ]") != std::string::npos);

  Certificate esc;
  esc.kind = CertKind::NotExcluded;
  esc.witness = Word::parse("112");
  const std::string et = esc.to_json_text();
  CHECK(et.find("\"pre\"") != std::string::npos);
  CHECK(et.find("\"per\"") != std::string::npos);
}
