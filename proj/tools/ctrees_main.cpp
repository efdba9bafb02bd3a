// Command line front end: every operation of the library behind one binary
// with file-based inputs and byte-deterministic outputs.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctrees/connectivity.hpp"
#include "ctrees/dimension.hpp"
#include "ctrees/family.hpp"
#include "ctrees/render.hpp"
#include "ctrees/roots.hpp"
#include "ctrees/words.hpp"

namespace {

using namespace ctrees;

// Raised when an --expect check fails; mapped to exit code 2.
struct ExpectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("bad number: '" + s + "'");
  }
  if (pos != s.size()) throw InputError("bad number: '" + s + "'");
  return v;
}

// Accepts the forms used throughout: "1.5+0.5i", "-0.41+0.6i", "i/2",
// "-3/5", "2/3", "i", "0".  Whitespace is ignored.
cplx parse_complex(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw InputError("empty complex literal");

  std::vector<std::string> terms;
  std::size_t start = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const char c = t[i];
    const char p = t[i - 1];
    if ((c == '+' || c == '-') && p != 'e' && p != 'E' && p != '/' && p != '+' && p != '-') {
      terms.push_back(t.substr(start, i - start));
      start = i;
    }
  }
  terms.push_back(t.substr(start));

  double re = 0.0, im = 0.0;
  for (std::string term : terms) {
    bool neg = false;
    if (term[0] == '+' || term[0] == '-') {
      neg = term[0] == '-';
      term.erase(0, 1);
    }
    if (term.empty()) throw InputError("bad complex literal: '" + text + "'");
    bool imag = false;
    const std::size_t ipos = term.find('i');
    if (ipos != std::string::npos) {
      imag = true;
      term.erase(ipos, 1);
      if (term.find('i') != std::string::npos)
        throw InputError("bad complex literal: '" + text + "'");
    }
    double v = 1.0;
    const std::size_t slash = term.find('/');
    if (slash != std::string::npos) {
      const std::string numer = term.substr(0, slash);
      const double den = to_double(term.substr(slash + 1));
      if (den == 0.0) throw InputError("zero denominator in '" + text + "'");
      v = (numer.empty() ? 1.0 : to_double(numer)) / den;
    } else if (!term.empty()) {
      v = to_double(term);
    }
    if (neg) v = -v;
    (imag ? im : re) += v;
  }
  return {re, im};
}

std::string format_complex(cplx z) {
  const double re = z.real() == 0.0 ? 0.0 : z.real();
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", re);
  std::string out = buf;
  out += std::signbit(im) ? '-' : '+';
  std::snprintf(buf, sizeof buf, "%.12g", std::abs(im));
  out += buf;
  out += 'i';
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

Viewport parse_viewport(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 4)
    throw InputError("viewport needs four numbers: re_min,re_max,im_min,im_max");
  Viewport v;
  v.re_min = to_double(parts[0]);
  v.re_max = to_double(parts[1]);
  v.im_min = to_double(parts[2]);
  v.im_max = to_double(parts[3]);
  return v;
}

std::vector<Relation> parse_relations(const std::string& text) {
  std::vector<Relation> rels;
  for (const std::string& part : split(text, ',')) {
    if (part.empty()) continue;
    const std::vector<std::string> sides = split(part, '=');
    if (sides.size() != 2) throw InputError("relation must look like 13~2=21~2");
    rels.emplace_back(EpWord::parse(sides[0]), EpWord::parse(sides[1]));
  }
  return rels;
}

int env_workers() {
  if (const char* e = std::getenv("CTREES_WORKERS")) {
    const int v = std::atoi(e);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Merges a JSON config file into options the command line left untouched.
struct ConfigBinder {
  std::vector<std::pair<CLI::Option*, std::function<void(const nlohmann::json&)>>> entries;
  std::string config_path;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with defaults for options not given");
  }

  template <class T>
  CLI::Option* bind(CLI::App* sub, const std::string& name, T& var, const std::string& desc) {
    CLI::Option* opt = sub->add_option(name, var, desc);
    entries.emplace_back(opt, [&var](const nlohmann::json& v) { var = v.get<T>(); });
    return opt;
  }

  CLI::Option* bind_flag(CLI::App* sub, const std::string& name, bool& var,
                         const std::string& desc) {
    CLI::Option* opt = sub->add_flag(name, var, desc);
    entries.emplace_back(opt, [&var](const nlohmann::json& v) { var = v.get<bool>(); });
    return opt;
  }

  void apply() const {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw InputError("cannot read config file: " + config_path);
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("config file is not valid JSON: " + std::string(e.what()));
    }
    for (const auto& [opt, set] : entries) {
      if (opt->count() > 0) continue;
      const auto& names = opt->get_lnames();
      if (names.empty() || !cfg.contains(names[0])) continue;
      try {
        set(cfg.at(names[0]));
      } catch (const nlohmann::json::exception&) {
        throw InputError("config value for '" + names[0] + "' has the wrong type");
      }
    }
  }
};

struct Source {
  std::string preset, family_file, alphabet, z_text;

  void add_family_options(CLI::App* sub, ConfigBinder& b) {
    b.bind(sub, "--preset", preset, "built-in family (see 'families'); ngon takes ngon:K");
    b.bind(sub, "--family", family_file, "family description JSON file");
  }

  void add_alphabet_options(CLI::App* sub, ConfigBinder& b) {
    add_family_options(sub, b);
    b.bind(sub, "--alphabet", alphabet, "comma-separated contraction factors");
    b.bind(sub, "--z", z_text, "parameter value for a family source");
  }

  bool has_family() const { return !preset.empty() || !family_file.empty(); }

  Family family() const {
    if (!preset.empty()) {
      const std::size_t colon = preset.find(':');
      if (colon == std::string::npos) return Family::preset(preset);
      return Family::preset(preset.substr(0, colon),
                            static_cast<int>(to_double(preset.substr(colon + 1))));
    }
    if (!family_file.empty()) return Family::from_json_file(family_file);
    throw InputError("need --preset or --family");
  }

  Alphabet letters() const {
    if (!alphabet.empty()) {
      std::vector<cplx> cs;
      for (const std::string& part : split(alphabet, ','))
        if (!part.empty()) cs.push_back(parse_complex(part));
      return Alphabet(std::move(cs));
    }
    if (!has_family()) throw InputError("need --alphabet, --preset or --family");
    if (z_text.empty()) throw InputError("a family source needs --z");
    return family().evaluate_or_throw(parse_complex(z_text));
  }

  // Relations from --relations text when given, else from the family.
  std::vector<Relation> relations(const std::string& rel_text) const {
    if (!rel_text.empty()) return parse_relations(rel_text);
    if (has_family()) return family().relations();
    return {};
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << text;
}

void emit_cloud(const RootCloud& cloud, const std::string& out_path) {
  if (!out_path.empty()) {
    if (out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json")
      write_cloud_json_file(cloud, out_path);
    else
      write_cloud_csv_file(cloud, out_path);
  }
  std::printf("points %zu\n", cloud.points.size());
  if (!cloud.points.empty()) {
    double min_mod = std::abs(cloud.points.front().z);
    for (const CloudPoint& p : cloud.points) min_mod = std::min(min_mod, std::abs(p.z));
    std::printf("min-modulus %.12g\n", min_mod);
  }
}

void check_expected_complex(const std::string& expect, cplx got, double tol) {
  if (expect.empty()) return;
  const cplx want = parse_complex(expect);
  if (std::abs(want - got) > tol)
    throw ExpectError("expected " + format_complex(want) + ", got " + format_complex(got));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tip points, parameter sets and renderings of complex trees"};
  app.require_subcommand(1);
  std::map<const CLI::App*, std::function<void()>> actions;

  // ---- tip ---------------------------------------------------------------
  struct TipState {
    ConfigBinder binder;
    Source src;
    std::string word, expect;
    double tol = 1e-9;
  };
  {
    auto st = std::make_shared<TipState>();
    CLI::App* sub = app.add_subcommand("tip", "tip or node point of an address");
    sub->add_option("word,--word", st->word,
                    "address: '13~2' (eventually periodic) or '132' (node)")
        ->required();
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--expect", st->expect, "fail (exit 2) unless the result matches");
    st->binder.bind(sub, "--tol", st->tol, "tolerance for --expect");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const Alphabet a = st->src.letters();
      const cplx p = st->word.find('~') != std::string::npos
                         ? tip_point(EpWord::parse(st->word), a)
                         : node_point(Word::parse(st->word), a);
      std::printf("%s\n", format_complex(p).c_str());
      check_expected_complex(st->expect, p, st->tol);
    };
  }

  // ---- tree / tipset -----------------------------------------------------
  struct DrawState {
    ConfigBinder binder;
    Source src;
    std::string out, viewport;
    int depth = 0, width = 800, height = 800;
    bool no_trunk = false;
    std::uint64_t budget = 10'000'000;
  };
  auto add_draw = [&](const std::string& name, const std::string& desc, int default_depth,
                      bool is_tree) {
    auto st = std::make_shared<DrawState>();
    st->depth = default_depth;
    CLI::App* sub = app.add_subcommand(name, desc);
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--out", st->out, "output image (binary PPM)")->required();
    st->binder.bind(sub, "--depth", st->depth, "expansion depth");
    st->binder.bind(sub, "--width", st->width, "image width in pixels");
    st->binder.bind(sub, "--height", st->height, "image height in pixels");
    st->binder.bind(sub, "--viewport", st->viewport, "re_min,re_max,im_min,im_max");
    st->binder.bind(sub, "--budget", st->budget, "max segments or points");
    if (is_tree) st->binder.bind_flag(sub, "--no-trunk", st->no_trunk, "skip the 0 to 1 edge");
    st->binder.attach(sub);
    actions[sub] = [st, is_tree] {
      st->binder.apply();
      const Alphabet a = st->src.letters();
      const Viewport view =
          st->viewport.empty() ? default_viewport(a) : parse_viewport(st->viewport);
      ImageGrid img(st->width, st->height, view);
      if (is_tree)
        render_tree(a, st->depth, img, !st->no_trunk, st->budget);
      else
        render_tipset(a, st->depth, img, st->budget);
      write_ppm(img, st->out);
      std::printf("wrote %s (%dx%d)\n", st->out.c_str(), st->width, st->height);
    };
  };
  add_draw("tree", "render the tree of node points", 8, true);
  add_draw("tipset", "render the tip set", 10, false);

  // ---- scan --------------------------------------------------------------
  struct ScanState {
    ConfigBinder binder;
    Source src;
    std::string out, viewport = "-1,1,-1,1", target = "0";
    std::string tests = "m2,m0,disconnect", res;
    int width = 256, height = 256;
    int overlay_level = 0;
    int escape_depth = 20, disconnect_level = 8;
    std::uint64_t frontier_cap = 3000, disk_budget = 100'000;
    int workers = env_workers();
  };
  {
    auto st = std::make_shared<ScanState>();
    CLI::App* sub = app.add_subcommand("scan", "classify a rectangle of family parameters");
    st->src.add_family_options(sub, st->binder);
    st->binder.bind(sub, "--out", st->out, "output image (binary PPM)")->required();
    st->binder.bind(sub, "--viewport", st->viewport, "re_min,re_max,im_min,im_max");
    st->binder.bind(sub, "--tests", st->tests, "subset of m2,m0,disconnect to run");
    st->binder.bind(sub, "--res", st->res, "resolution WxH, e.g. 256x256");
    st->binder.bind(sub, "--overlay-mcloud", st->overlay_level,
                    "stamp the relation root cloud of this level in red (approximation)");
    st->binder.bind(sub, "--width", st->width, "image width in pixels");
    st->binder.bind(sub, "--height", st->height, "image height in pixels");
    st->binder.bind(sub, "--escape-target", st->target, "point for the membership test");
    st->binder.bind(sub, "--escape-depth", st->escape_depth, "membership pullback depth");
    st->binder.bind(sub, "--frontier-cap", st->frontier_cap, "membership frontier cap");
    st->binder.bind(sub, "--disconnect-level", st->disconnect_level, "max separating cover level");
    st->binder.bind(sub, "--disk-budget", st->disk_budget, "max disks per cover");
    st->binder.bind(sub, "--workers", st->workers, "worker threads (CTREES_WORKERS)");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const Family fam = st->src.family();
      if (!st->res.empty()) {
        const std::size_t x = st->res.find_first_of("xX");
        if (x == std::string::npos || x == 0 || x + 1 == st->res.size())
          throw InputError("--res expects WxH, e.g. 256x256");
        st->width = static_cast<int>(to_double(st->res.substr(0, x)));
        st->height = static_cast<int>(to_double(st->res.substr(x + 1)));
      }
      ScanOptions opt;
      opt.test_dim2 = opt.test_rootconn = opt.test_disconnected = false;
      for (const std::string& t : split(st->tests, ',')) {
        if (t == "m2")
          opt.test_dim2 = true;
        else if (t == "m0")
          opt.test_rootconn = true;
        else if (t == "disconnect")
          opt.test_disconnected = true;
        else if (!t.empty())
          throw InputError("unknown scan test '" + t + "' (choices: m2, m0, disconnect)");
      }
      opt.escape_target = parse_complex(st->target);
      opt.escape_depth = st->escape_depth;
      opt.frontier_cap = st->frontier_cap;
      opt.disconnect_max_level = st->disconnect_level;
      opt.disk_budget = st->disk_budget;
      opt.workers = st->workers;
      const LabelGrid grid =
          scan_parameter_grid(fam, parse_viewport(st->viewport), st->width, st->height, opt);
      ImageGrid img = label_image(grid);
      if (st->overlay_level > 0) {
        CloudOptions copt;
        copt.workers = st->workers;
        const RootCloud cloud =
            relation_root_cloud(fam, st->overlay_level, default_tails(fam), copt);
        std::vector<cplx> pts;
        pts.reserve(cloud.points.size());
        for (const CloudPoint& p : cloud.points) pts.push_back(p.z);
        overlay_points(img, pts, 200, 0, 0);
      }
      write_ppm(img, st->out);
      const double total = static_cast<double>(grid.labels.size());
      std::size_t dim2 = 0, rootconn = 0, disconnected = 0, violation = 0;
      for (const std::uint8_t l : grid.labels) {
        dim2 += (l & kLabelDim2) != 0;
        rootconn += (l & kLabelRootConn) != 0;
        disconnected += (l & kLabelDisconnected) != 0;
        violation += (l & kLabelDomainViolation) != 0;
      }
      std::printf("pixels %zu\n", grid.labels.size());
      std::printf("dim2 %.6f\n", dim2 / total);
      std::printf("rootconn %.6f\n", rootconn / total);
      std::printf("disconnected %.6f\n", disconnected / total);
      std::printf("domain-violation %.6f\n", violation / total);
      std::printf("wrote %s (%dx%d)\n", st->out.c_str(), st->width, st->height);
    };
  }

  // ---- mcloud / m0cloud ----------------------------------------------------
  struct CloudState {
    ConfigBinder binder;
    Source src;
    std::string out, tails;
    int level = 0;
    std::uint64_t budget = 1'000'000;
    double cluster_radius = 1e-7;
    bool include_declared = false;
    int workers = env_workers();
  };
  auto add_cloud = [&](const std::string& name, const std::string& desc, bool m0) {
    auto st = std::make_shared<CloudState>();
    CLI::App* sub = app.add_subcommand(name, desc);
    st->src.add_family_options(sub, st->binder);
    st->binder
        .bind(sub, m0 ? "--order" : "--level", st->level,
              m0 ? "max node depth" : "max address length")
        ->required();
    st->binder.bind(sub, "--tails", st->tails, "comma-separated tail periods (default: declared)");
    st->binder.bind(sub, "--budget", st->budget, "max tip pairs or equations");
    st->binder.bind(sub, "--cluster-radius", st->cluster_radius, "dedup radius for roots");
    st->binder.bind(sub, "--workers", st->workers, "worker threads (CTREES_WORKERS)");
    st->binder.bind(sub, "--out", st->out, "output file (.csv or .json)");
    if (!m0)
      st->binder.bind_flag(sub, "--include-declared", st->include_declared,
                           "keep pairs matching declared relations");
    st->binder.attach(sub);
    actions[sub] = [st, m0] {
      st->binder.apply();
      const Family fam = st->src.family();
      std::vector<Word> tails;
      for (const std::string& part : split(st->tails, ','))
        if (!part.empty()) tails.push_back(Word::parse(part));
      CloudOptions opt;
      opt.pair_budget = st->budget;
      opt.cluster_radius = st->cluster_radius;
      opt.exclude_declared = !st->include_declared;
      opt.workers = st->workers;
      const RootCloud cloud = m0 ? root_connectivity_cloud(fam, st->level, tails, opt)
                                 : relation_root_cloud(fam, st->level, tails, opt);
      emit_cloud(cloud, st->out);
    };
  };
  add_cloud("mcloud", "roots of unexpected tip coincidences across the family", false);
  add_cloud("m0cloud", "parameters whose tree passes through the origin", true);

  // ---- dim ---------------------------------------------------------------
  struct DimState {
    ConfigBinder binder;
    Source src;
    std::string ray, expect;
    double alpha = 2.0, tol = 1e-9;
  };
  {
    auto st = std::make_shared<DimState>();
    CLI::App* sub = app.add_subcommand("dim", "similarity dimension, or its locus on a ray");
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--ray", st->ray,
                    "ray angle in radians: print all t with dimension exponent --alpha");
    st->binder.bind(sub, "--alpha", st->alpha, "target exponent for --ray");
    st->binder.bind(sub, "--expect", st->expect, "fail (exit 2) unless the dimension matches");
    st->binder.bind(sub, "--tol", st->tol, "tolerance for --expect");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      if (!st->ray.empty()) {
        const std::vector<double> ts =
            dimension_locus_on_ray(st->src.family(), to_double(st->ray), st->alpha);
        for (const double t : ts) std::printf("%.12g\n", t);
        return;
      }
      const DimensionReport report = similarity_dimension(st->src.letters());
      std::printf("alpha %.16g\n", report.alpha);
      if (!st->expect.empty() && std::abs(to_double(st->expect) - report.alpha) > st->tol)
        throw ExpectError("expected dimension " + st->expect);
    };
  }

  // ---- check ---------------------------------------------------------------
  struct CheckState {
    ConfigBinder binder;
    Source src;
    std::string relations, expect, out;
    double tol = kDefaultRelationTol;
    int max_level = 8, dendrite = 0;
    std::uint64_t budget = 10'000'000;
  };
  {
    auto st = std::make_shared<CheckState>();
    CLI::App* sub = app.add_subcommand("check", "connectivity verdict with a certificate");
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--relations", st->relations, "claimed coincidences: 13~2=21~2,...");
    st->binder.bind(sub, "--tol", st->tol, "residual tolerance for relations");
    st->binder.bind(sub, "--max-level", st->max_level, "max separating cover level");
    st->binder.bind(sub, "--dendrite", st->dendrite,
                    "nonzero: run the dendrite consistency check at this cover level");
    st->binder.bind(sub, "--budget", st->budget, "max disks per cover");
    st->binder.bind(sub, "--expect", st->expect,
                    "fail (exit 2) unless the verdict kind matches");
    st->binder.bind(sub, "--out", st->out, "write the certificate JSON here too");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const Alphabet a = st->src.letters();
      const std::vector<Relation> rels = st->src.relations(st->relations);
      const Certificate cert =
          st->dendrite > 0 ? dendrite_consistency(a, rels, st->dendrite, st->budget)
                           : connectivity_verdict(a, rels, st->tol, st->max_level, st->budget);
      const std::string text = cert.to_json_text();
      std::fputs(text.c_str(), stdout);
      if (!st->out.empty()) write_text(st->out, text);
      if (!st->expect.empty() && to_string(cert.kind) != st->expect)
        throw ExpectError("expected verdict '" + st->expect + "', got '" + to_string(cert.kind) +
                          "'");
    };
  }

  // ---- overlap -------------------------------------------------------------
  struct OverlapState {
    ConfigBinder binder;
    Source src;
    std::string out, pair;
    int left = 0, right = 0, level = 0;
    std::uint64_t budget = 10'000'000;
    double tol = 1e-9;
  };
  {
    auto st = std::make_shared<OverlapState>();
    CLI::App* sub = app.add_subcommand("overlap", "locate touching pieces of two letters, or "
                                                  "test whether two addressed pieces coincide");
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--left", st->left, "first letter");
    st->binder.bind(sub, "--right", st->right, "second letter");
    st->binder.bind(sub, "--level", st->level, "cover level");
    st->binder.bind(sub, "--pair", st->pair, "piece pair 'u,v': test exact coincidence instead");
    st->binder.bind(sub, "--tol", st->tol, "tolerance for --pair");
    st->binder.bind(sub, "--budget", st->budget, "max disks per cover");
    st->binder.bind(sub, "--out", st->out, "write CSV here instead of stdout");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const Alphabet a = st->src.letters();
      if (!st->pair.empty()) {
        const std::vector<std::string> parts = split(st->pair, ',');
        if (parts.size() != 2) throw InputError("--pair expects two comma-separated words");
        const Word u = Word::parse(parts[0]);
        const Word v = Word::parse(parts[1]);
        const bool same = pieces_coincide(u, v, a, st->tol);
        const Similarity h = neighbor_map(u, v, a);
        std::printf("coincide: %s\n", same ? "true" : "false");
        std::printf("neighbor-map: node %s scale %s\n", format_complex(h.node).c_str(),
                    format_complex(h.scale).c_str());
        return;
      }
      if (st->left == 0 || st->right == 0 || st->level == 0)
        throw InputError("give --left, --right and --level (or --pair)");
      const std::vector<OverlapHit> hits =
          overlap_localization(a, st->left, st->right, st->level, st->budget);
      std::string csv = "left,right,re,im\n";
      char buf[96];
      for (const OverlapHit& h : hits) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", h.midpoint.real(), h.midpoint.imag());
        csv += h.left.str() + "," + h.right.str() + buf;
      }
      if (st->out.empty())
        std::fputs(csv.c_str(), stdout);
      else
        write_text(st->out, csv);
      std::fprintf(st->out.empty() ? stderr : stdout, "hits %zu\n", hits.size());
    };
  }

  // ---- pcf -----------------------------------------------------------------
  struct PcfState {
    ConfigBinder binder;
    Source src;
    std::string relations;
  };
  {
    auto st = std::make_shared<PcfState>();
    CLI::App* sub = app.add_subcommand("pcf", "shift orbit closure of the declared relations");
    st->src.add_alphabet_options(sub, st->binder);
    st->binder.bind(sub, "--relations", st->relations, "claimed coincidences: 13~2=21~2,...");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const std::vector<Relation> rels = st->src.relations(st->relations);
      if (rels.empty()) throw InputError("no relations: give --relations or a family source");
      const std::vector<EpWord> orbit = post_critical_set(rels);
      for (const EpWord& w : orbit) std::printf("%s\n", w.str().c_str());
      std::printf("p.c.f.: true (cardinality %zu)\n", orbit.size());
    };
  }

  // ---- verify-family ---------------------------------------------------------
  struct VerifyState {
    ConfigBinder binder;
    Source src;
    int samples = 200;
    std::uint64_t seed = 0;
    double tol = 1e-8;
  };
  {
    auto st = std::make_shared<VerifyState>();
    CLI::App* sub =
        app.add_subcommand("verify-family", "sample the declared relations across the family");
    st->src.add_family_options(sub, st->binder);
    st->binder.bind(sub, "--samples", st->samples, "number of admissible parameters to draw");
    st->binder.bind(sub, "--seed", st->seed, "sampling seed");
    st->binder.bind(sub, "--tol", st->tol, "max tolerated residual");
    st->binder.attach(sub);
    actions[sub] = [st] {
      st->binder.apply();
      const Family fam = st->src.family();
      const double residual = fam.verify_identities(st->samples, st->seed);
      std::printf("max residual %.3e over %d samples\n", residual, st->samples);
      if (residual > st->tol)
        throw ExpectError("relations exceed the tolerance " + std::to_string(st->tol));
    };
  }

  // ---- families ---------------------------------------------------------------
  {
    CLI::App* sub = app.add_subcommand("families", "list the built-in families");
    actions[sub] = [] {
      for (const std::string& name : Family::preset_names()) std::printf("%s\n", name.c_str());
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const CLI::App* sub : app.get_subcommands()) actions.at(sub)();
  } catch (const ExpectError& e) {
    std::fprintf(stderr, "expectation failed: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
