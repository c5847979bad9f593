#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ufa/activation.hpp"
#include "ufa/samples.hpp"
#include "ufa/ufa_core.hpp"

namespace ufa {

inline constexpr double containment_margin = 1e-15;

struct containment_violation {
  std::size_t sample = 0;
  std::size_t output = 0;
  double value = 0.0;
  value_range allowed{};
};

struct hypothesis_report {
  bool range_passed = true;
  std::vector<containment_violation> violations;

  std::vector<interval> sigma_intervals; // where each sigma_j was certified
  std::vector<certification_report> sigma_certificates;

  certification_report g_certificate;
  double preimage_lo = 0.0; // min / max of <x, delta> over the samples
  double preimage_hi = 0.0;
  std::string delta_resolution; // policy used, or why it failed

  bool overall_passed = false;
};

// Diagnostic only: failures are reported, never thrown (except for a sigma
// count that does not match the output dimension).
hypothesis_report check_hypotheses(const sample_set& samples, const activation& g, std::span<const activation> sigmas,
                                   const delta_policy& deltas, std::size_t grid = default_certification_grid);

std::string render_text(const hypothesis_report& report);
std::string render_kv(const hypothesis_report& report);

// The sigma domain when it is finite, otherwise the hull of sigma^-1(y_j)
// over the admissible samples (padded to unit width when degenerate).
interval sigma_working_interval(const activation& sigma, const sample_set& samples, std::size_t output);

// Grid certificate for g on the hull of `preimages`, additionally requiring
// |g| > 1e-12 at every preimage itself. A preimage outside the domain of g
// fails the certificate.
certification_report certify_hidden(const activation& g, std::span<const double> preimages, std::size_t grid);

// Wrapper c * sigma + d whose range holds every observed output of component
// `output` with `margin` of the wrapped range width to spare on both sides.
// Returns c = 1, d = 0 when that already holds. Throws NotApplicable for an
// unbounded sigma whose containment already holds.
activation suggest_rescale(const sample_set& samples, std::size_t output, const activation& sigma, double margin);

} // namespace ufa
