#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrees/family.hpp"
#include "ctrees/words.hpp"

namespace ctrees {

// One piece of the level-k cover: the image of the bounding disk under the
// similarity of a length-k word.  index is the rank of that word in
// lexicographic order (first symbol most significant).
struct Disk {
  cplx center;
  double radius = 0.0;
  std::uint64_t index = 0;
};

struct DiskCover {
  int level = 0;
  int alphabet_size = 0;
  std::vector<Disk> disks;
};

DiskCover disk_cover(const Alphabet& a, int level, std::uint64_t budget = 10'000'000);

// Decode a disk index back into its word.
Word cover_word(const DiskCover& cover, std::uint64_t index);

enum class CertKind { Connected, Disconnected, Excluded, NotExcluded, Inconclusive };

std::string to_string(CertKind kind);

// Outcome of a connectivity or membership check, with enough context to
// audit it: the level the decision was made at, a letter partition for
// disconnection proofs, a surviving address prefix for escape tests.
struct Certificate {
  CertKind kind = CertKind::Inconclusive;
  int level = 0;
  std::vector<int> partition;        // group id per letter (Disconnected only)
  std::optional<Word> witness;       // surviving prefix (escape test only)
  bool low_confidence = false;       // a search budget was exhausted
  std::string note;

  std::string to_json_text() const;
};

// Tries cover levels 1..max_level; reports Disconnected as soon as the
// level-k disks split into components that separate the letters.  Sound:
// piece j lies inside the union of its disks, and distinct components of
// the disk graph have positive distance.
Certificate certify_disconnected(const Alphabet& a, int max_level = 8,
                                 std::uint64_t budget = 10'000'000);

// Whether the declared relations connect all letters (edge j-k per relation
// whose sides start with j and k).
bool letter_graph_connected(int n, const std::vector<Relation>& rels);

struct EscapeOptions {
  int max_depth = 24;
  std::size_t frontier_cap = 1'000'000;
};

// Membership test for a point in the attractor by pulling it back through
// all letter inverses and pruning pullbacks that leave the bounding disk.
// Excluded is a proof; NotExcluded means some address prefix survived to
// max_depth (low_confidence if the frontier overflowed instead).
Certificate escape_membership(const Alphabet& a, cplx target, const EscapeOptions& opt = {});

// A touching pair of level-m disks, one from piece j and one from piece k.
struct OverlapHit {
  Word left;
  Word right;
  cplx midpoint;
};

// All intersecting disk pairs between pieces j and k at the given level,
// sorted by (left, right).
std::vector<OverlapHit> overlap_localization(const Alphabet& a, int j, int k, int level,
                                             std::uint64_t budget = 10'000'000);

// Heuristic certificate that the attractor is a dendrite with exactly the
// declared touching structure: relations hold numerically, the letter graph
// is connected, every cross-piece overlap at level m localizes near a
// declared tip, and removing the disks near each tip disconnects the cover.
Certificate dendrite_consistency(const Alphabet& a, const std::vector<Relation>& rels, int m,
                                 std::uint64_t budget = 10'000'000);

// Combined verdict: Connected when the declared relations hold and connect
// the letter graph, else a disconnection proof if one is found, else
// Inconclusive.
Certificate connectivity_verdict(const Alphabet& a, const std::vector<Relation>& rels,
                                 double tol = kDefaultRelationTol, int max_level = 8,
                                 std::uint64_t budget = 10'000'000);

}  // namespace ctrees
