#include "ufa/samples.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

sample_set::sample_set(std::size_t n, std::size_t m, std::vector<sample_point> points,
                       std::optional<std::vector<interval>> box)
    : n_(n), m_(m) {
  if (n == 0 || m == 0) fail(errc::invalid_argument, "sample dimensions must be at least 1");
  if (points.empty()) fail(errc::invalid_argument, "sample set is empty");

  std::map<std::vector<double>, std::pair<std::size_t, std::size_t>> seen;
  points_.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& pt = points[i];
    if (pt.x.size() != n || pt.y.size() != m) {
      error e(errc::dimension_mismatch, "sample " + std::to_string(i) + " has shape (" +
                                            std::to_string(pt.x.size()) + ", " + std::to_string(pt.y.size()) +
                                            "), expected (" + std::to_string(n) + ", " + std::to_string(m) + ")");
      e.index = i;
      throw e;
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(pt.x.begin(), pt.x.end(), finite) || !std::all_of(pt.y.begin(), pt.y.end(), finite)) {
      error e(errc::invalid_argument, "sample " + std::to_string(i) + " has a non-finite coordinate");
      e.index = i;
      throw e;
    }
    auto [it, inserted] = seen.try_emplace(pt.x, i, points_.size());
    if (!inserted) {
      if (points_[it->second.second].y == pt.y) continue;
      error e(errc::conflicting_duplicate, "samples " + std::to_string(it->second.first) + " and " + std::to_string(i) +
                                               " share an input but disagree on the output");
      e.index = i;
      e.related_index = it->second.first;
      throw e;
    }
    points_.push_back(std::move(pt));
  }

  if (box) {
    if (box->size() != n) fail(errc::dimension_mismatch, "domain box has wrong dimension");
    box_ = std::move(*box);
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (!box_[k].contains(points_[i].x[k])) {
          error e(errc::domain_violation, "sample " + std::to_string(i) + " lies outside the domain box");
          e.index = i;
          throw e;
        }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      double lo = points_[0].x[k], hi = lo;
      for (const auto& pt : points_) {
        lo = std::min(lo, pt.x[k]);
        hi = std::max(hi, pt.x[k]);
      }
      if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
      }
      box_.emplace_back(lo, hi);
    }
  }
}

std::vector<std::vector<double>> sample_set::anchors() const {
  std::vector<std::vector<double>> out;
  out.reserve(points_.size());
  for (const auto& pt : points_) out.push_back(pt.x);
  return out;
}

std::uint64_t sample_set::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(n_);
  mix(m_);
  mix(points_.size());
  for (const auto& pt : points_) {
    for (double v : pt.x) mix(std::bit_cast<std::uint64_t>(v));
    for (double v : pt.y) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

} // namespace ufa
