#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ufa/activation.hpp"
#include "ufa/baseline_gd.hpp"
#include "ufa/network.hpp"
#include "ufa/samples.hpp"

namespace ufa {

enum class builtin_id { sine_bump, gauss2d, swirl2to2 };

// Benchmark targets whose outputs stay inside (0, 1) on their domain box.
//   sine-bump : 0.4 sin(pi x) + 0.5                              on [0,1]
//   gauss2d   : 0.8 exp(-|x - (0.5,0.5)|^2) + 0.1                on [0,1]^2
//   swirl2to2 : (0.5 + 0.3 sin(pi x1) cos(pi x2), 0.5 + 0.3 x1 x2) on [0,1]^2
struct builtin_target {
  builtin_id id;
  std::size_t n;
  std::size_t m;
  std::vector<interval> domain_box;

  static builtin_target get(builtin_id id);
  static builtin_target parse(std::string_view name);
  std::string name() const;

  std::vector<double> operator()(std::span<const double> x) const;
};

// Uniform grid, per_axis points per axis: lo + i * (hi - lo) / (per_axis - 1).
// A non-zero `shift` translates every anchor by +shift on each axis while the
// outputs stay those of the untranslated grid (the target is evaluated at
// x - shift), moving anchors off the origin.
sample_set sample_builtin(const builtin_target& target, std::size_t per_axis, double shift = 0.0);

// Header `x1,...,xn,y1,...,ym`; decimal reals. ParseError / ConflictingDuplicate
// carry the 1-based line number in error::index.
sample_set load_samples_csv(std::istream& in);
sample_set read_samples_csv(const std::string& path);
void write_samples_csv(std::ostream& out, const sample_set& samples);
void write_samples_csv_file(const sample_set& samples, const std::string& path);

// Two columns: iteration,mse (iteration 0 is the initial loss).
void write_loss_csv(std::ostream& out, const gd_report& report);

// Columns x1..xn, f1..fm, net1..netm; one row per query. The network is queried
// with nearest-anchor routing, so rows between anchors are interpolation, not
// reconstruction.
struct plot_row {
  std::vector<double> x;
  std::vector<double> f;
};
void write_plot_csv(std::ostream& out, const shallow_network& net, std::span<const plot_row> rows);
std::vector<plot_row> plot_rows_builtin(const builtin_target& target, std::size_t per_axis, double shift = 0.0);
std::vector<plot_row> plot_rows_samples(const sample_set& samples);

std::string render_text(const reconstruction_report& report);
std::string render_kv(const reconstruction_report& report);

} // namespace ufa
