#include "eqgym/expr/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace eqgym::expr {

std::string_view scale_hint_name(ScaleHint s) { return s == ScaleHint::kLog ? "log" : "linear"; }

bool VariableDomain::contains(double v) const {
  if (!std::isfinite(v)) return false;
  if (open_lower ? v <= lower : v < lower) return false;
  if (open_upper ? v >= upper : v > upper) return false;
  return true;
}

void VariableDomain::validate() const {
  if (!std::isfinite(lower) || !std::isfinite(upper)) throw std::invalid_argument("domain bounds must be finite");
  if (!(lower < upper)) throw std::invalid_argument("domain requires lower < upper");
  if (scale_hint == ScaleHint::kLog && !(lower > 0)) {
    throw std::invalid_argument("log scale requires a positive lower bound");
  }
}

namespace {

double draw(const VariableDomain& d, std::mt19937_64& rng, bool log_scale) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    double u = unit_draw(rng);
    double v = log_scale ? std::exp(std::log(d.lower) + u * (std::log(d.upper) - std::log(d.lower)))
                         : d.lower + u * (d.upper - d.lower);
    // exp/log round-off can step just outside the closed interval.
    v = std::fmin(std::fmax(v, d.lower), d.upper);
    if (d.contains(v)) return v;
  }
  // Practically unreachable: an open interval so narrow every draw lands on
  // an endpoint. Fall back to the midpoint.
  return d.lower + 0.5 * (d.upper - d.lower);
}

}  // namespace

double sample_for_equivalence(const VariableDomain& d, std::mt19937_64& rng) {
  bool log_scale = d.lower > 0 && d.upper / d.lower > 100.0;
  return draw(d, rng, log_scale);
}

double sample_by_hint(const VariableDomain& d, std::mt19937_64& rng) {
  return draw(d, rng, d.scale_hint == ScaleHint::kLog && d.lower > 0);
}

}  // namespace eqgym::expr
