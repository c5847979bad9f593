#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ufa/activation.hpp"
#include "ufa/samples.hpp"
#include "ufa/ufa_core.hpp"

namespace ufa {

// One hidden node dedicated to one anchor: n input weights, m output weights.
struct point_unit {
  std::vector<double> anchor_x;
  std::vector<double> delta;
  std::vector<double> theta;
  double hidden_value = 0.0; // g(<anchor_x, delta>)

  friend bool operator==(const point_unit&, const point_unit&) = default;
};

struct architecture {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;

  friend bool operator==(const architecture&, const architecture&) = default;
};

// n*p input nodes, p hidden nodes, m*p output nodes.
architecture architecture_counts(std::size_t n, std::size_t m, std::size_t p);

class shallow_network {
public:
  shallow_network(activation g, std::vector<activation> sigmas, std::vector<point_unit> units);

  std::size_t n() const { return units_.front().anchor_x.size(); }
  std::size_t m() const { return sigmas_.size(); }
  std::size_t p() const { return units_.size(); }
  architecture counts() const { return architecture_counts(n(), m(), p()); }

  const activation& g() const { return g_; }
  const std::vector<activation>& sigmas() const { return sigmas_; }
  const std::vector<point_unit>& units() const { return units_; }

  // Wall time of build_network; zero for loaded networks.
  double construction_seconds() const { return construction_seconds_; }
  void set_construction_seconds(double s) { construction_seconds_ = s; }

  friend bool operator==(const shallow_network& a, const shallow_network& b) {
    return a.g_ == b.g_ && a.sigmas_ == b.sigmas_ && a.units_ == b.units_;
  }

private:
  activation g_;
  std::vector<activation> sigmas_;
  std::vector<point_unit> units_;
  double construction_seconds_ = 0.0;
};

struct build_options {
  delta_policy deltas = delta_policy::automatic();
  std::size_t certification_grid = default_certification_grid;
};

// Single pass: resolve deltas, certify every sigma and g, then one
// compute_theta_vector per sample. Errors carry the sample index.
shallow_network build_network(const sample_set& samples, const activation& g, std::span<const activation> sigmas,
                              const build_options& options = {});

// Which unit answers a query. Only anchor-exact queries are covered by the
// reconstruction guarantee; nearest-anchor is an interpolation extension.
struct routing {
  enum class mode { anchor_exact, nearest_anchor, unit };

  mode kind = mode::anchor_exact;
  std::size_t unit_index = 0;

  static routing anchor_exact() { return {}; }
  static routing nearest_anchor() { return {mode::nearest_anchor, 0}; }
  static routing unit(std::size_t i) { return {mode::unit, i}; }
  // "anchor-exact" | "nearest-anchor" | "unit:<i>"
  static routing parse(std::string_view text);
};

// Per-coordinate anchor match: |x_k - a_k| <= 1e-12 * max(1, |a_k|).
bool anchor_matches(std::span<const double> x, std::span<const double> anchor);

struct eval_trace {
  std::size_t unit_index = 0;
  double alpha = 0.0; // g(<x, delta>)
  std::vector<double> preactivations;
  std::vector<double> outputs;
};

eval_trace forward(const shallow_network& net, std::span<const double> x, routing route = routing::anchor_exact());

struct reconstruction_report {
  std::vector<double> per_point_max_abs_residual;
  double max_abs_residual = 0.0;
  double sse = 0.0;
  double construction_seconds = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::size_t p = 0;
  std::size_t m = 0;
  std::uint64_t sample_fingerprint = 0;

  double mse() const { return p ? sse / static_cast<double>(p) : 0.0; }
};

// Anchor-exact forward pass at every sample. Throws AnchorMismatch unless the
// samples are exactly the network's anchors.
reconstruction_report verify_reconstruction(const shallow_network& net, const sample_set& samples, double tolerance);

// Text format "UFANET v1"; reals are shortest round-trip decimals.
std::string save_network(const shallow_network& net);
shallow_network load_network(std::string_view text);

void save_network_file(const shallow_network& net, const std::string& path);
shallow_network load_network_file(const std::string& path);

} // namespace ufa
