#include "ctrees/dimension.hpp"

#include <cmath>
#include <optional>

namespace ctrees {

namespace {

double moment(const std::vector<cplx>& letters, double alpha) {
  double s = 0.0;
  for (const cplx& c : letters) s += std::pow(std::abs(c), alpha);
  return s;
}

}  // namespace

DimensionReport similarity_dimension(const Alphabet& a, double tol) {
  double lo = 1e-6, hi = 64.0;
  // moment is strictly decreasing in alpha since every |c_j| < 1.
  if (moment(a.letters(), lo) < 1.0 || moment(a.letters(), hi) > 1.0)
    throw BracketError("similarity dimension is not in [1e-6, 64]");
  DimensionReport report;
  for (report.iterations = 0; report.iterations < 200 && hi - lo > tol; ++report.iterations) {
    const double mid = 0.5 * (lo + hi);
    (moment(a.letters(), mid) >= 1.0 ? lo : hi) = mid;
  }
  report.alpha = 0.5 * (lo + hi);
  report.residual = std::abs(moment(a.letters(), report.alpha) - 1.0);
  return report;
}

double squared_modulus_sum(const Alphabet& a) {
  double s = 0.0;
  for (const cplx& c : a.letters()) s += std::norm(c);
  return s;
}

bool dimension_exceeds_two(const Family& fam, cplx z) {
  return squared_modulus_sum(fam.evaluate_or_throw(z)) > 1.0;
}

std::vector<double> dimension_locus_on_ray(const Family& fam, double angle, double alpha,
                                           double tol) {
  if (alpha <= 0.0) throw InputError("locus exponent must be positive");
  const cplx dir = std::polar(1.0, angle);
  auto value = [&](double t) -> std::optional<double> {
    const std::optional<Alphabet> a = fam.evaluate(t * dir);
    if (!a.has_value()) return std::nullopt;
    return moment(a->letters(), alpha) - 1.0;
  };

  constexpr int kSamples = 8192;
  constexpr double kMaxT = 4.0;
  std::vector<double> crossings;
  std::optional<double> prev;
  double prev_t = 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    const double t = kMaxT * i / kSamples;
    const std::optional<double> g = value(t);
    if (prev.has_value() && g.has_value() &&
        ((*prev < 0.0) != (*g < 0.0) || *prev == 0.0 || *g == 0.0)) {
      double lo = prev_t, hi = t;
      double glo = *prev;
      bool ok = true;
      for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const std::optional<double> gm = value(mid);
        if (!gm.has_value()) {
          ok = false;
          break;
        }
        if ((glo < 0.0) == (*gm < 0.0)) {
          lo = mid;
          glo = *gm;
        } else {
          hi = mid;
        }
      }
      if (ok) crossings.push_back(0.5 * (lo + hi));
    }
    prev = g;
    prev_t = t;
  }
  if (crossings.empty())
    throw NoCrossingError("no admissible dimension crossing on this ray up to t = 4");
  return crossings;
}

}  // namespace ctrees
