#pragma once

// Open intervals and finite unions of disjoint open intervals on the
// extended real line.  These stand in for the Borel sets appearing in the
// value-distribution machinery; every set we ever need is of this form.

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace valdist {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const { return hi - lo; }
  bool contains(double x) const { return lo < x && x < hi; }
};

enum class Membership { inside, outside, boundary };

class IntervalUnion {
 public:
  IntervalUnion() = default;

  explicit IntervalUnion(std::vector<Interval> parts) : parts_(std::move(parts)) {
    validate();
  }

  IntervalUnion(std::initializer_list<Interval> parts)
      : parts_(parts.begin(), parts.end()) {
    validate();
  }

  static IntervalUnion empty() { return IntervalUnion{}; }

  static IntervalUnion whole_line() { return IntervalUnion{{-kInf, kInf}}; }

  const std::vector<Interval>& parts() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }

  Membership classify(double x) const {
    for (const Interval& iv : parts_) {
      if (x == iv.lo || x == iv.hi) return Membership::boundary;
      if (iv.contains(x)) return Membership::inside;
    }
    return Membership::outside;
  }

  bool contains(double x) const { return classify(x) == Membership::inside; }

  // Open complement; shared endpoints collapse to empty gaps and are dropped.
  IntervalUnion complement() const {
    std::vector<Interval> out;
    double cursor = -kInf;
    for (const Interval& iv : parts_) {
      if (cursor < iv.lo) out.push_back({cursor, iv.lo});
      cursor = iv.hi;
    }
    if (cursor < kInf) out.push_back({cursor, kInf});
    return IntervalUnion(std::move(out));
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (std::isnan(parts_[i].lo) || std::isnan(parts_[i].hi))
        throw std::invalid_argument("IntervalUnion: NaN endpoint");
      if (!(parts_[i].lo < parts_[i].hi))
        throw std::invalid_argument("IntervalUnion: requires lo < hi");
      if (i > 0 && !(parts_[i - 1].hi <= parts_[i].lo))
        throw std::invalid_argument("IntervalUnion: intervals must be disjoint and increasing");
    }
  }

  std::vector<Interval> parts_;
};

}  // namespace valdist
