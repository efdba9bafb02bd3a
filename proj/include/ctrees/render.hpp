#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrees/family.hpp"
#include "ctrees/words.hpp"

namespace ctrees {

struct Viewport {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
};

// Raster with the usual image convention: pixel (0,0) is top-left, so the
// imaginary axis decreases with y.  Pixels map to their center points and
// pixel_of is half-open on the right and bottom edges.
class ImageGrid {
 public:
  ImageGrid(int width, int height, Viewport view);

  int width() const { return w_; }
  int height() const { return h_; }
  const Viewport& view() const { return view_; }

  cplx pixel_center(int x, int y) const;
  std::optional<std::pair<int, int>> pixel_of(cplx z) const;

  void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  const std::vector<std::uint8_t>& rgb() const { return rgb_; }

 private:
  int w_, h_;
  Viewport view_;
  std::vector<std::uint8_t> rgb_;
};

// Per-pixel classification bits produced by the parameter scan.
enum LabelBit : std::uint8_t {
  kLabelDim2 = 1,
  kLabelRootConn = 2,
  kLabelDisconnected = 4,
  kLabelDomainViolation = 8,
};

struct LabelGrid {
  int width = 0, height = 0;
  Viewport view;
  std::vector<std::uint8_t> labels;

  cplx pixel_center(int x, int y) const;
};

struct ScanOptions {
  bool test_dim2 = true;
  bool test_rootconn = true;
  bool test_disconnected = true;
  cplx escape_target{0.0, 0.0};
  int escape_depth = 20;
  std::size_t frontier_cap = 3000;
  int disconnect_max_level = 8;
  std::uint64_t disk_budget = 100'000;
  int workers = 1;
};

// Classifies every pixel center of the viewport.  Rows are handed out to
// workers through a shared counter and written independently, so the result
// does not depend on the worker count or on scheduling.
LabelGrid scan_parameter_grid(const Family& fam, const Viewport& view, int width, int height,
                              const ScanOptions& opt = {});

// Fixed palette, one color per label combination, strongest signal first:
// domain violations and certified disconnection paint white, root
// connectivity black, dimension >= 2 light gray, everything else mid gray.
ImageGrid label_image(const LabelGrid& grid);

struct TreeSegment {
  cplx a, b;
  int letter = 0;  // first symbol of the child word
};

// Edges node(v) -> node(vj) for all words of length <= depth.
std::vector<TreeSegment> collect_tree_segments(const Alphabet& a, int depth,
                                               std::uint64_t budget = 10'000'000);

// Level-`depth` node points tagged with their first symbol, an
// approximation of the tip set at resolution contraction^depth.
std::vector<std::pair<cplx, int>> collect_tipset_points(const Alphabet& a, int depth,
                                                        std::uint64_t budget = 10'000'000);

void render_tree(const Alphabet& a, int depth, ImageGrid& img, bool draw_trunk = true,
                 std::uint64_t budget = 10'000'000);
void render_tipset(const Alphabet& a, int depth, ImageGrid& img,
                   std::uint64_t budget = 10'000'000);

// Square viewport covering the bounding disk (and the origin, so trunks are
// visible), padded by margin * diameter on each side.
Viewport default_viewport(const Alphabet& a, double margin = 0.1);

// Stamps one pixel per point; points outside the viewport are dropped.  The
// composite of a root cloud over a scan is an approximation of the parameter
// sets, not a certificate.
void overlay_points(ImageGrid& img, const std::vector<cplx>& points, std::uint8_t r,
                    std::uint8_t g, std::uint8_t b);

std::string ppm_bytes(const ImageGrid& img);
void write_ppm(const ImageGrid& img, const std::string& path);

}  // namespace ctrees
