#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/logic.hpp"

namespace poscop {

// Validation tolerance on a density's maximum and on level grouping.
inline constexpr double kDensityTolerance = 1e-9;
inline constexpr double kLevelTolerance = 1e-9;

// A possibility density: one value per world, all in [0,1], maximum 1.
// Construction validates (max within kDensityTolerance of 1) and clamps
// stray rounding excursions into [0,1]; it never rescales — see normalized().
class Density {
 public:
  Density(Frame frame, std::vector<double> values);

  // Rescales by the maximum (which must be positive) and validates.
  static Density normalized(Frame frame, std::vector<double> values);

  // Skips validation. For tests and callers that guarantee the invariant.
  static Density unchecked(Frame frame, std::vector<double> values);

  const Frame& frame() const { return frame_; }
  std::span<const double> values() const { return values_; }
  double operator[](WorldIndex w) const { return values_[w]; }
  std::uint32_t world_count() const { return static_cast<std::uint32_t>(values_.size()); }

  friend bool operator==(const Density& a, const Density& b) {
    return a.frame_ == b.frame_ && a.values_ == b.values_;
  }

 private:
  Density(Frame frame, std::vector<double> values, bool validated);

  Frame frame_;
  std::vector<double> values_;
};

// Π(A): the maximum density value over the worlds of A (0 for the empty event).
double measure(const Density& d, const Event& a);

// Co(A) = 1 - Π(complement A): the consonant belief (necessity) of A.
double necessity(const Density& d, const Event& a);

// Thin callable view of the measure induced by a density.
class PossibilityMeasure {
 public:
  explicit PossibilityMeasure(Density d) : density_(std::move(d)) {}
  double operator()(const Event& a) const { return measure(density_, a); }
  double necessity_of(const Event& a) const { return necessity(density_, a); }
  const Density& density() const { return density_; }

 private:
  Density density_;
};

// Consonant mass assignment: a strictly nested focal chain with positive
// masses summing to 1 and no mass on the empty set.
class MValueFunction {
 public:
  MValueFunction(std::vector<Event> focal_chain, std::vector<double> masses);

  const Frame& frame() const { return focal_.front().frame(); }
  const std::vector<Event>& focal_chain() const { return focal_; }
  const std::vector<double>& masses() const { return masses_; }
  std::size_t size() const { return focal_.size(); }

  // Co_m(A): total mass of focal elements contained in A.
  double belief(const Event& a) const;

 private:
  std::vector<Event> focal_;
  std::vector<double> masses_;
};

// Level decomposition: distinct positive values 1 = v1 > v2 > ... > vk
// (grouped within kLevelTolerance) give focal elements S_i = {w : d[w] >= v_i}
// with masses v_i - v_{i+1} (v_{k+1} = 0). Worlds at 0 join no focal element.
MValueFunction to_mvalue(const Density& d);

// Inverse reconstruction: each world receives the sum of the masses of the
// focal elements containing it, accumulated along the chain.
Density from_mvalue(const MValueFunction& m);

enum class Ordering { Less, Equal, Greater };

// Qualitative expectation comparison induced by a density:
// a is expected at least as much as b iff Π(not a) <= Π(not b).
Ordering compare_expectation(const Density& d, const Formula& a, const Formula& b);

class ExpectationOrdering {
 public:
  explicit ExpectationOrdering(Density d) : density_(std::move(d)) {}
  Ordering compare(const Formula& a, const Formula& b) const {
    return compare_expectation(density_, a, b);
  }
  bool at_least(const Formula& a, const Formula& b) const {
    return compare(a, b) != Ordering::Less;
  }
  const Density& density() const { return density_; }

 private:
  Density density_;
};

struct ExpectationViolation {
  std::string axiom;                    // "E1" .. "E4"
  std::vector<std::size_t> sample_ids;  // indexes into the checked sample
  std::string detail;
};

struct ExpectationReport {
  std::uint64_t e1_checked = 0;  // ordered triples
  std::uint64_t e2_checked = 0;  // provable implications found in the sample
  std::uint64_t e3_checked = 0;  // ordered pairs
  std::uint64_t e4_checked = 0;  // single check
  std::vector<ExpectationViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the ordering axioms over a formula sample:
//   E1 transitivity over all triples; E2 dominance for provable implications
//   (models-subset test); E3 over all pairs: a&b is expected at least as much
//   as a or at least as much as b; E4 once: true is strictly above false.
// Raises InvalidDensityError if d is not a valid density.
ExpectationReport check_expectation_axioms(const Density& d, std::span<const Formula> sample);

// Text format:
//   # comment
//   frame: X Y
//   T T : 1.0
//   F T : 0.2
// Missing worlds default to 0.0. The listed values must attain 1.
Density parse_density(std::string_view text);
std::string format_density(const Density& d);

// Canonical number rendering used across text output: the shortest decimal
// form that parses back to the same double.
std::string format_value(double v);

}  // namespace poscop
