#include "ufa/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

using detail::format_real;

namespace {

std::string range_text(const value_range& r) {
  return std::string(r.lo_open ? "(" : "[") + format_real(r.lo) + ", " + format_real(r.hi) + (r.hi_open ? ")" : "]");
}

const char* verdict(bool ok) { return ok ? "passed" : "FAILED"; }

} // namespace

interval sigma_working_interval(const activation& sigma, const sample_set& samples, std::size_t output) {
  const interval& dom = sigma.domain();
  if (dom.finite()) return dom;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& pt : samples.points()) {
    const double y = pt.y[output];
    if (!sigma.monotone() || !sigma.range().admits(y, containment_margin)) continue;
    const double x = sigma.invert(y);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo > hi) {
    lo = 0.0;
    hi = 0.0;
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  lo = std::max(lo, dom.lo);
  hi = std::min(hi, dom.hi);
  return {lo, hi};
}

certification_report certify_hidden(const activation& g, std::span<const double> preimages, std::size_t grid) {
  certification_report rep;
  rep.property = certified_property::value_nonvanishing;
  if (preimages.empty()) return rep;

  for (double v : preimages)
    if (!g.domain().contains(v)) {
      rep.grid_size = 0;
      rep.worst_point = v;
      rep.worst_value = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }

  const auto [lo_it, hi_it] = std::minmax_element(preimages.begin(), preimages.end());
  if (*lo_it < *hi_it) {
    rep = check_nonvanishing(g, interval(*lo_it, *hi_it), grid);
  } else {
    rep.grid_size = 1;
    rep.worst_point = *lo_it;
    rep.worst_value = g.eval(*lo_it);
    rep.passed = std::abs(rep.worst_value) > weight_threshold;
  }
  for (double v : preimages) {
    const double gv = g.eval(v);
    if (!(std::abs(gv) > weight_threshold)) rep.passed = false;
    if (std::abs(gv) < std::abs(rep.worst_value)) {
      rep.worst_point = v;
      rep.worst_value = gv;
    }
  }
  return rep;
}

hypothesis_report check_hypotheses(const sample_set& samples, const activation& g, std::span<const activation> sigmas,
                                   const delta_policy& deltas, std::size_t grid) {
  if (sigmas.size() != samples.m())
    fail(errc::dimension_mismatch, std::to_string(sigmas.size()) + " output activations for " +
                                       std::to_string(samples.m()) + " outputs");

  hypothesis_report rep;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < samples.m(); ++j) {
      const double y = samples[i].y[j];
      if (!sigmas[j].range().admits(y, containment_margin)) {
        rep.range_passed = false;
        rep.violations.push_back({i, j, y, sigmas[j].range()});
      }
    }

  bool sigmas_ok = true;
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    rep.sigma_intervals.push_back(sigma_working_interval(sigmas[j], samples, j));
    rep.sigma_certificates.push_back(check_invertible(sigmas[j], rep.sigma_intervals.back(), grid));
    sigmas_ok = sigmas_ok && rep.sigma_certificates.back().passed;
  }

  const auto anchors = samples.anchors();
  std::vector<std::vector<double>> resolved;
  bool delta_ok = true;
  try {
    resolved = resolve_deltas(deltas, anchors, samples.n(), g);
    rep.delta_resolution = deltas.to_string();
    if (deltas.kind == delta_policy::mode::automatic)
      rep.delta_resolution += " (delta = " + format_real(resolved.front().front()) + " * ones)";
  } catch (const error& e) {
    delta_ok = false;
    rep.delta_resolution = std::string(errc_name(e.code())) + ": " + e.what();
    if (deltas.kind == delta_policy::mode::automatic)
      resolved.assign(anchors.size(), std::vector<double>(samples.n(), 1.0));
  }

  std::vector<double> pre;
  for (std::size_t i = 0; i < resolved.size(); ++i) pre.push_back(inner_product(anchors[i], resolved[i]));
  if (!pre.empty()) {
    const auto [lo, hi] = std::minmax_element(pre.begin(), pre.end());
    rep.preimage_lo = *lo;
    rep.preimage_hi = *hi;
  } else {
    rep.preimage_lo = rep.preimage_hi = std::numeric_limits<double>::quiet_NaN();
  }
  rep.g_certificate = certify_hidden(g, pre, grid);

  rep.overall_passed = rep.range_passed && sigmas_ok && rep.g_certificate.passed && delta_ok;
  return rep;
}

std::string render_text(const hypothesis_report& r) {
  std::ostringstream os;
  os << "range containment: " << verdict(r.range_passed) << " (" << r.violations.size() << " violations)\n";
  for (const auto& v : r.violations)
    os << "  sample " << v.sample << " output " << v.output << ": value " << format_real(v.value)
       << " outside " << range_text(v.allowed) << "\n";
  for (std::size_t j = 0; j < r.sigma_certificates.size(); ++j) {
    const auto& c = r.sigma_certificates[j];
    os << "sigma[" << j << "] on [" << format_real(r.sigma_intervals[j].lo) << ", "
       << format_real(r.sigma_intervals[j].hi) << "]: " << property_name(c.property) << " " << verdict(c.passed)
       << " (grid " << c.grid_size << ", min |sigma'| = " << format_real(std::abs(c.worst_value)) << " at "
       << format_real(c.worst_point) << ")\n";
  }
  const auto& g = r.g_certificate;
  os << "g on preimages [" << format_real(r.preimage_lo) << ", " << format_real(r.preimage_hi)
     << "]: " << property_name(g.property) << " " << verdict(g.passed) << " (grid " << g.grid_size
     << ", min |g| = " << format_real(std::abs(g.worst_value)) << " at " << format_real(g.worst_point) << ")\n";
  os << "delta policy: " << r.delta_resolution << "\n";
  os << "overall: " << (r.overall_passed ? "PASSED" : "FAILED") << "\n";
  return os.str();
}

std::string render_kv(const hypothesis_report& r) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "range_containment.passed=" << b(r.range_passed) << "\n";
  os << "range_containment.violations=" << r.violations.size() << "\n";
  for (std::size_t k = 0; k < r.violations.size(); ++k) {
    const auto& v = r.violations[k];
    os << "range_containment.violation." << k << ".sample=" << v.sample << "\n";
    os << "range_containment.violation." << k << ".output=" << v.output << "\n";
    os << "range_containment.violation." << k << ".value=" << format_real(v.value) << "\n";
    os << "range_containment.violation." << k << ".allowed=" << range_text(v.allowed) << "\n";
  }
  for (std::size_t j = 0; j < r.sigma_certificates.size(); ++j) {
    const auto& c = r.sigma_certificates[j];
    os << "sigma." << j << ".interval=" << format_real(r.sigma_intervals[j].lo) << ","
       << format_real(r.sigma_intervals[j].hi) << "\n";
    os << "sigma." << j << ".passed=" << b(c.passed) << "\n";
    os << "sigma." << j << ".grid=" << c.grid_size << "\n";
    os << "sigma." << j << ".worst_point=" << format_real(c.worst_point) << "\n";
    os << "sigma." << j << ".worst_value=" << format_real(c.worst_value) << "\n";
  }
  const auto& g = r.g_certificate;
  os << "g.preimage_interval=" << format_real(r.preimage_lo) << "," << format_real(r.preimage_hi) << "\n";
  os << "g.passed=" << b(g.passed) << "\n";
  os << "g.grid=" << g.grid_size << "\n";
  os << "g.worst_point=" << format_real(g.worst_point) << "\n";
  os << "g.worst_value=" << format_real(g.worst_value) << "\n";
  os << "delta_policy=" << r.delta_resolution << "\n";
  os << "overall_passed=" << b(r.overall_passed) << "\n";
  return os.str();
}

activation suggest_rescale(const sample_set& samples, std::size_t output, const activation& sigma, double margin) {
  if (!(margin > 0.0 && margin < 0.5)) fail(errc::invalid_argument, "rescale margin must lie in (0, 0.5)");
  if (output >= samples.m()) fail(errc::invalid_argument, "output index out of range");
  if (!sigma.monotone()) fail(errc::not_invertible, sigma.to_string() + " is not strictly monotone");

  double ymin = samples[0].y[output], ymax = ymin;
  for (const auto& pt : samples.points()) {
    ymin = std::min(ymin, pt.y[output]);
    ymax = std::max(ymax, pt.y[output]);
  }
  const double spread = ymax - ymin;
  const value_range& r = sigma.range();
  auto wrap = [&](double c, double d) { return activation::scaled(c, d, sigma).with_inverse(sigma.strategy()); };

  if (!r.bounded()) {
    const bool holds = r.admits(ymin, containment_margin) && r.admits(ymax, containment_margin);
    if (holds)
      fail(errc::not_applicable, sigma.to_string() + " has an unbounded range that already contains the outputs");
    const double pad = margin * std::max(spread, 1.0);
    if (std::isfinite(r.lo)) return wrap(1.0, ymin - pad - r.lo);
    return wrap(1.0, ymax + pad - r.hi);
  }

  const double width = r.hi - r.lo;
  const double slack = 1e-12 * width;
  if (ymin - (r.lo + margin * width) >= -slack && (r.hi - margin * width) - ymax >= -slack &&
      r.admits(ymin, containment_margin) && r.admits(ymax, containment_margin))
    return wrap(1.0, 0.0);

  if (spread == 0.0) return wrap(1.0, ymin - 0.5 * (r.lo + r.hi));
  const double c = spread / ((1.0 - 2.0 * margin) * width);
  const double d = ymin - margin * c * width - c * r.lo;
  return wrap(c, d);
}

} // namespace ufa
