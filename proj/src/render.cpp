#include "ctrees/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "ctrees/connectivity.hpp"
#include "ctrees/dimension.hpp"

namespace ctrees {

namespace {

void check_raster(int width, int height) {
  if (width < 1 || height < 1 || width > 1 << 14 || height > 1 << 14)
    throw InputError("raster size must be between 1 and 16384 pixels per side");
}

void check_view(const Viewport& v) {
  if (!(v.re_max > v.re_min) || !(v.im_max > v.im_min))
    throw InputError("viewport must have positive extent");
}

cplx center_at(const Viewport& v, int w, int h, int x, int y) {
  return {v.re_min + (x + 0.5) * (v.re_max - v.re_min) / w,
          v.im_max - (y + 0.5) * (v.im_max - v.im_min) / h};
}

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kLetterPalette[] = {
    {202, 60, 60},  {60, 120, 202}, {60, 160, 90},   {190, 140, 50}, {140, 80, 180},
    {60, 170, 170}, {180, 100, 140}, {110, 110, 110}, {150, 150, 60},
};

Rgb letter_color(int letter) {
  return kLetterPalette[static_cast<std::size_t>(letter - 1) % std::size(kLetterPalette)];
}

void draw_line(ImageGrid& img, cplx a, cplx b, Rgb color) {
  const auto pa = img.pixel_of(a);
  const auto pb = img.pixel_of(b);
  double steps = 1.0;
  if (pa && pb)
    steps = std::max({std::abs(static_cast<double>(pa->first - pb->first)),
                      std::abs(static_cast<double>(pa->second - pb->second)), 1.0});
  else
    steps = std::max(img.width(), img.height());
  const int nsteps = 2 * static_cast<int>(steps) + 1;
  for (int i = 0; i <= nsteps; ++i) {
    const double t = static_cast<double>(i) / nsteps;
    if (const auto px = img.pixel_of(a + t * (b - a)))
      img.set_pixel(px->first, px->second, color.r, color.g, color.b);
  }
}

}  // namespace

ImageGrid::ImageGrid(int width, int height, Viewport view) : w_(width), h_(height), view_(view) {
  check_raster(width, height);
  check_view(view);
  rgb_.assign(static_cast<std::size_t>(w_) * h_ * 3, 255);
}

cplx ImageGrid::pixel_center(int x, int y) const { return center_at(view_, w_, h_, x, y); }

std::optional<std::pair<int, int>> ImageGrid::pixel_of(cplx z) const {
  const int x = static_cast<int>(
      std::floor((z.real() - view_.re_min) / (view_.re_max - view_.re_min) * w_));
  const int y = static_cast<int>(
      std::floor((view_.im_max - z.imag()) / (view_.im_max - view_.im_min) * h_));
  if (x < 0 || x >= w_ || y < 0 || y >= h_) return std::nullopt;
  return std::make_pair(x, y);
}

void ImageGrid::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::size_t at = (static_cast<std::size_t>(y) * w_ + x) * 3;
  rgb_[at] = r;
  rgb_[at + 1] = g;
  rgb_[at + 2] = b;
}

cplx LabelGrid::pixel_center(int x, int y) const { return center_at(view, width, height, x, y); }

LabelGrid scan_parameter_grid(const Family& fam, const Viewport& view, int width, int height,
                              const ScanOptions& opt) {
  check_raster(width, height);
  check_view(view);
  LabelGrid grid;
  grid.width = width;
  grid.height = height;
  grid.view = view;
  grid.labels.assign(static_cast<std::size_t>(width) * height, 0);

  std::atomic<int> next_row{0};
  auto run = [&]() {
    for (;;) {
      const int y = next_row.fetch_add(1);
      if (y >= height) return;
      for (int x = 0; x < width; ++x) {
        const cplx z = grid.pixel_center(x, y);
        std::uint8_t label = 0;
        const std::optional<Alphabet> a = fam.evaluate(z);
        if (!a.has_value()) {
          label = kLabelDomainViolation;
        } else {
          if (opt.test_dim2 && squared_modulus_sum(*a) > 1.0) label |= kLabelDim2;
          if (opt.test_rootconn) {
            EscapeOptions eo;
            eo.max_depth = opt.escape_depth;
            eo.frontier_cap = opt.frontier_cap;
            if (escape_membership(*a, opt.escape_target, eo).kind == CertKind::NotExcluded)
              label |= kLabelRootConn;
          }
          if (opt.test_disconnected) {
            try {
              if (certify_disconnected(*a, opt.disconnect_max_level, opt.disk_budget).kind ==
                  CertKind::Disconnected)
                label |= kLabelDisconnected;
            } catch (const BudgetError&) {
              // out of budget: leave the pixel unmarked rather than guess
            }
          }
        }
        grid.labels[static_cast<std::size_t>(y) * width + x] = label;
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
  return grid;
}

ImageGrid label_image(const LabelGrid& grid) {
  ImageGrid img(grid.width, grid.height, grid.view);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const std::uint8_t label = grid.labels[static_cast<std::size_t>(y) * grid.width + x];
      Rgb c{128, 128, 128};
      if (label & kLabelDomainViolation)
        c = {255, 255, 255};
      else if (label & kLabelDisconnected)
        c = {255, 255, 255};
      else if (label & kLabelRootConn)
        c = {0, 0, 0};
      else if (label & kLabelDim2)
        c = {200, 200, 200};
      img.set_pixel(x, y, c.r, c.g, c.b);
    }
  }
  return img;
}

std::vector<TreeSegment> collect_tree_segments(const Alphabet& a, int depth,
                                               std::uint64_t budget) {
  if (depth < 1) throw InputError("tree depth must be >= 1");
  const int n = a.size();
  std::uint64_t total = 0, level = 1;
  for (int d = 1; d <= depth; ++d) {
    level *= static_cast<std::uint64_t>(n);
    total += level;
    if (total > budget) throw BudgetError("tree of depth " + std::to_string(depth) +
                                          " exceeds the segment budget");
  }

  std::vector<TreeSegment> segments;
  segments.reserve(total);
  struct Frame {
    cplx node, prod;
    int letter, d;
  };
  // Depth-first in letter order keeps the output deterministic.
  std::vector<Frame> stack;
  for (int j = n; j >= 1; --j) stack.push_back({cplx{1, 0}, cplx{1, 0}, j, 0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const cplx prod = f.prod * a.letter(f.letter);
    const cplx child = f.node + prod;
    segments.push_back({f.node, child, f.letter});
    if (f.d + 1 < depth)
      for (int j = n; j >= 1; --j) stack.push_back({child, prod, j, f.d + 1});
  }
  return segments;
}

std::vector<std::pair<cplx, int>> collect_tipset_points(const Alphabet& a, int depth,
                                                        std::uint64_t budget) {
  if (depth < 1) throw InputError("tip set depth must be >= 1");
  const int n = a.size();
  std::uint64_t total = 1;
  for (int d = 0; d < depth; ++d) {
    total *= static_cast<std::uint64_t>(n);
    if (total > budget)
      throw BudgetError("tip set of depth " + std::to_string(depth) + " exceeds the point budget");
  }

  std::vector<std::pair<cplx, int>> points;
  points.reserve(total);
  struct Frame {
    cplx node, prod;
    int letter, first, d;
  };
  std::vector<Frame> stack;
  for (int j = n; j >= 1; --j) stack.push_back({cplx{1, 0}, cplx{1, 0}, j, j, 0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const cplx prod = f.prod * a.letter(f.letter);
    const cplx child = f.node + prod;
    if (f.d + 1 == depth) {
      points.emplace_back(child, f.first);
    } else {
      for (int j = n; j >= 1; --j) stack.push_back({child, prod, j, f.first, f.d + 1});
    }
  }
  return points;
}

void render_tree(const Alphabet& a, int depth, ImageGrid& img, bool draw_trunk,
                 std::uint64_t budget) {
  if (draw_trunk) draw_line(img, cplx{0, 0}, cplx{1, 0}, Rgb{40, 40, 40});
  for (const TreeSegment& s : collect_tree_segments(a, depth, budget))
    draw_line(img, s.a, s.b, letter_color(s.letter));
}

void render_tipset(const Alphabet& a, int depth, ImageGrid& img, std::uint64_t budget) {
  for (const auto& [z, letter] : collect_tipset_points(a, depth, budget)) {
    if (const auto px = img.pixel_of(z)) {
      const Rgb c = letter_color(letter == 0 ? 1 : letter);
      img.set_pixel(px->first, px->second, c.r, c.g, c.b);
    }
  }
}

void overlay_points(ImageGrid& img, const std::vector<cplx>& points, std::uint8_t r,
                    std::uint8_t g, std::uint8_t b) {
  for (const cplx& p : points)
    if (const auto px = img.pixel_of(p)) img.set_pixel(px->first, px->second, r, g, b);
}

Viewport default_viewport(const Alphabet& a, double margin) {
  const double R = a.bounding_radius();
  const double lo = std::min(0.0, 1.0 - R);
  const double hi = 1.0 + R;
  const double side = std::max(hi - lo, 2.0 * R);
  const double pad = margin * side;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * side + pad;
  Viewport v;
  v.re_min = mid - half;
  v.re_max = mid + half;
  v.im_min = -half;
  v.im_max = half;
  return v;
}

std::string ppm_bytes(const ImageGrid& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb().data()), img.rgb().size());
  return out;
}

void write_ppm(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write image file: " + path);
  const std::string bytes = ppm_bytes(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace ctrees
