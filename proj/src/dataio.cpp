#include "ufa/dataio.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

using detail::format_real;

builtin_target builtin_target::get(builtin_id id) {
  switch (id) {
    case builtin_id::sine_bump: return {id, 1, 1, {interval(0.0, 1.0)}};
    case builtin_id::gauss2d: return {id, 2, 1, {interval(0.0, 1.0), interval(0.0, 1.0)}};
    case builtin_id::swirl2to2: return {id, 2, 2, {interval(0.0, 1.0), interval(0.0, 1.0)}};
  }
  fail(errc::invalid_argument, "unknown builtin target");
}

builtin_target builtin_target::parse(std::string_view name) {
  if (name == "sine-bump") return get(builtin_id::sine_bump);
  if (name == "gauss2d") return get(builtin_id::gauss2d);
  if (name == "swirl2to2") return get(builtin_id::swirl2to2);
  fail(errc::parse_error, "unknown builtin target '" + std::string(name) + "' (sine-bump, gauss2d, swirl2to2)");
}

std::string builtin_target::name() const {
  switch (id) {
    case builtin_id::sine_bump: return "sine-bump";
    case builtin_id::gauss2d: return "gauss2d";
    case builtin_id::swirl2to2: return "swirl2to2";
  }
  return "unknown";
}

std::vector<double> builtin_target::operator()(std::span<const double> x) const {
  using std::numbers::pi;
  if (x.size() != n) fail(errc::dimension_mismatch, name() + " expects " + std::to_string(n) + " inputs");
  switch (id) {
    case builtin_id::sine_bump: return {0.4 * std::sin(pi * x[0]) + 0.5};
    case builtin_id::gauss2d: {
      const double d0 = x[0] - 0.5, d1 = x[1] - 0.5;
      return {0.8 * std::exp(-(d0 * d0 + d1 * d1)) + 0.1};
    }
    case builtin_id::swirl2to2:
      return {0.5 + 0.3 * std::sin(pi * x[0]) * std::cos(pi * x[1]), 0.5 + 0.3 * x[0] * x[1]};
  }
  return {};
}

namespace {

// Calls fn(grid point) for every point of the per_axis^n grid, last axis fastest.
template <class Fn>
void for_each_grid_point(const std::vector<interval>& box, std::size_t per_axis, Fn&& fn) {
  if (per_axis < 2) fail(errc::invalid_argument, "need at least 2 grid points per axis");
  const std::size_t n = box.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  const double steps = static_cast<double>(per_axis - 1);
  while (true) {
    for (std::size_t k = 0; k < n; ++k)
      x[k] = box[k].lo + (static_cast<double>(idx[k]) * (box[k].hi - box[k].lo)) / steps;
    fn(x);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  error e(errc::parse_error, "line " + std::to_string(line) + ": " + what);
  e.index = line;
  throw e;
}

} // namespace

sample_set sample_builtin(const builtin_target& target, std::size_t per_axis, double shift) {
  if (!std::isfinite(shift)) fail(errc::invalid_argument, "shift must be finite");
  std::vector<sample_point> points;
  for_each_grid_point(target.domain_box, per_axis, [&](const std::vector<double>& x) {
    sample_point pt{x, target(x)};
    if (shift != 0.0)
      for (auto& v : pt.x) v += shift;
    points.push_back(std::move(pt));
  });
  std::vector<interval> box;
  for (const auto& iv : target.domain_box) box.emplace_back(iv.lo + shift, iv.hi + shift);
  return sample_set(target.n, target.m, std::move(points), std::move(box));
}

sample_set load_samples_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!strip(line).empty()) break;
  }
  if (strip(line).empty()) parse_fail(line_no == 0 ? 1 : line_no, "missing header");

  const auto header = split_csv(strip(line));
  std::size_t n = 0, m = 0;
  for (auto name : header) {
    name = strip(name);
    const bool is_x = name.starts_with("x");
    const std::string expected = is_x && m == 0 ? "x" + std::to_string(n + 1) : "y" + std::to_string(m + 1);
    if (name != expected) parse_fail(line_no, "expected column '" + expected + "', got '" + std::string(name) + "'");
    (is_x ? n : m) += 1;
  }
  if (n == 0 || m == 0) parse_fail(line_no, "header needs at least one x and one y column");

  std::vector<sample_point> points;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto cells = split_csv(strip(line));
    if (cells.size() != n + m)
      parse_fail(line_no, "expected " + std::to_string(n + m) + " fields, got " + std::to_string(cells.size()));
    sample_point pt;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto v = detail::parse_real(cells[c]);
      if (!v || !std::isfinite(*v)) parse_fail(line_no, "malformed number '" + std::string(strip(cells[c])) + "'");
      (c < n ? pt.x : pt.y).push_back(*v);
    }
    points.push_back(std::move(pt));
    lines.push_back(line_no);
  }
  if (points.empty()) parse_fail(line_no, "no data rows");

  try {
    return sample_set(n, m, std::move(points));
  } catch (const error& e) {
    if (e.code() != errc::conflicting_duplicate || !e.index || !e.related_index) throw;
    error out(errc::conflicting_duplicate, "lines " + std::to_string(lines[*e.related_index]) + " and " +
                                               std::to_string(lines[*e.index]) +
                                               " share an input but disagree on the output");
    out.index = lines[*e.index];
    out.related_index = lines[*e.related_index];
    throw out;
  }
}

sample_set read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  return load_samples_csv(in);
}

void write_samples_csv(std::ostream& out, const sample_set& samples) {
  for (std::size_t k = 0; k < samples.n(); ++k) out << (k ? "," : "") << "x" << k + 1;
  for (std::size_t j = 0; j < samples.m(); ++j) out << ",y" << j + 1;
  out << "\n";
  for (const auto& pt : samples.points()) {
    for (std::size_t k = 0; k < pt.x.size(); ++k) out << (k ? "," : "") << format_real(pt.x[k]);
    for (double y : pt.y) out << "," << format_real(y);
    out << "\n";
  }
}

void write_samples_csv_file(const sample_set& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  write_samples_csv(out, samples);
}

void write_loss_csv(std::ostream& out, const gd_report& report) {
  out << "iteration,mse\n";
  out << 0 << "," << format_real(report.initial_mse) << "\n";
  for (std::size_t i = 0; i < report.loss_history.size(); ++i)
    out << i + 1 << "," << format_real(report.loss_history[i]) << "\n";
}

void write_plot_csv(std::ostream& out, const shallow_network& net, std::span<const plot_row> rows) {
  for (std::size_t k = 0; k < net.n(); ++k) out << (k ? "," : "") << "x" << k + 1;
  for (std::size_t j = 0; j < net.m(); ++j) out << ",f" << j + 1;
  for (std::size_t j = 0; j < net.m(); ++j) out << ",net" << j + 1;
  out << "\n";
  for (const auto& row : rows) {
    if (row.f.size() != net.m()) fail(errc::dimension_mismatch, "plot row has wrong output dimension");
    const auto tr = forward(net, row.x, routing::nearest_anchor());
    for (std::size_t k = 0; k < row.x.size(); ++k) out << (k ? "," : "") << format_real(row.x[k]);
    for (double f : row.f) out << "," << format_real(f);
    for (double y : tr.outputs) out << "," << format_real(y);
    out << "\n";
  }
}

std::vector<plot_row> plot_rows_builtin(const builtin_target& target, std::size_t per_axis, double shift) {
  std::vector<plot_row> rows;
  for_each_grid_point(target.domain_box, per_axis, [&](const std::vector<double>& x) {
    plot_row row{x, target(x)};
    for (auto& v : row.x) v += shift;
    rows.push_back(std::move(row));
  });
  return rows;
}

std::vector<plot_row> plot_rows_samples(const sample_set& samples) {
  std::vector<plot_row> rows;
  for (const auto& pt : samples.points()) rows.push_back({pt.x, pt.y});
  return rows;
}

std::string render_text(const reconstruction_report& r) {
  std::ostringstream os;
  os << "points: " << r.p << " (outputs per point: " << r.m << ")\n";
  os << "max |residual|: " << format_real(r.max_abs_residual) << "\n";
  os << "sse: " << format_real(r.sse) << "  mse: " << format_real(r.mse()) << "\n";
  os << "construction: " << format_real(r.construction_seconds) << " s, 1 step\n";
  os << "tolerance: " << format_real(r.tolerance) << " -> " << (r.passed ? "PASSED" : "FAILED") << "\n";
  return os.str();
}

std::string render_kv(const reconstruction_report& r) {
  std::ostringstream os;
  os << "p=" << r.p << "\n";
  os << "m=" << r.m << "\n";
  os << "max_abs_residual=" << format_real(r.max_abs_residual) << "\n";
  os << "sse=" << format_real(r.sse) << "\n";
  os << "mse=" << format_real(r.mse()) << "\n";
  os << "construction_seconds=" << format_real(r.construction_seconds) << "\n";
  os << "tolerance=" << format_real(r.tolerance) << "\n";
  os << "passed=" << (r.passed ? "true" : "false") << "\n";
  return os.str();
}

} // namespace ufa
