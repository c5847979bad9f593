#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ufa/activation.hpp"

namespace ufa {

struct sample_point {
  std::vector<double> x;
  std::vector<double> y;

  friend bool operator==(const sample_point&, const sample_point&) = default;
};

// p >= 1 samples of f : R^n -> R^m. Exact duplicate points are collapsed
// (first occurrence kept, order otherwise preserved); the same x with a
// different y is a ConflictingDuplicate.
class sample_set {
public:
  // Without a box, the bounding box of the inputs is used (degenerate axes
  // widened by 0.5 each side).
  sample_set(std::size_t n, std::size_t m, std::vector<sample_point> points,
             std::optional<std::vector<interval>> box = std::nullopt);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<sample_point>& points() const { return points_; }
  const sample_point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<interval>& domain_box() const { return box_; }

  std::vector<std::vector<double>> anchors() const;

  // FNV-1a over dims and the bit patterns of every coordinate.
  std::uint64_t fingerprint() const;

  friend bool operator==(const sample_set& a, const sample_set& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.points_ == b.points_;
  }

private:
  std::size_t n_;
  std::size_t m_;
  std::vector<sample_point> points_;
  std::vector<interval> box_;
};

} // namespace ufa
