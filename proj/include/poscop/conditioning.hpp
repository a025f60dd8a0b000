#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/possibility.hpp"

namespace poscop {

// Stratification of an evidence set by increasing possibility.  Block i
// collects the evidence atoms whose values coincide up to kLevelTolerance
// (anchored at the smallest member); levels[i] is the largest value inside
// block i, so the last level equals the possibility of the evidence exactly.
struct Strata {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<double> levels;

  std::size_t size() const { return blocks.size(); }

  // Possibility of the evidence: the top level, or 0 for empty strata.
  double evidence_possibility() const { return levels.empty() ? 0.0 : levels.back(); }

  // Total confidence mass the rule has to distribute: 1 - evidence possibility.
  double normalization_constant() const { return 1.0 - evidence_possibility(); }
};

// A conditioning rule decides how the normalization constant 1 - P(evidence)
// is split into per-stratum coefficients c_1..c_n (c_i >= 0, summing to the
// constant).  Conditioning then raises every atom of stratum i by
// c_1 + ... + c_i and zeroes everything outside the evidence.
class Rule {
 public:
  // Maps the strata levels p_1 <= ... <= p_n and the normalization constant
  // to the coefficient vector c_1..c_n.
  using Strategy = std::function<std::vector<double>(std::span<const double>, double)>;

  // c_i = (p_i - p_{i-1}) * constant / p_n: every value is rescaled by 1/p_n.
  static Rule dempster();
  // c_n = constant, the rest 0: only the top stratum is promoted, to 1.
  static Rule minimum();
  // c_1 = constant, the rest 0: every stratum is raised by the full constant.
  static Rule yager();
  // User-supplied strategy; its output is validated against the contract.
  static Rule custom(std::string name, Strategy strategy);
  // Resolves "dempster" | "minimum" | "yager"; throws Error otherwise.
  static Rule from_name(std::string_view name);

  const std::string& name() const { return name_; }

  // Runs the strategy and enforces the contract: one coefficient per
  // stratum, none below -kRuleContractTolerance (tiny negatives are clamped
  // to zero), summing to the normalization constant within the same bound.
  // Throws ZeroPossibilityError if the evidence possibility is zero and
  // RuleContractError if the strategy breaks the contract.
  std::vector<double> coefficients(const Strata& strata) const;

 private:
  Rule(std::string name, Strategy strategy);

  std::string name_;
  Strategy strategy_;
};

inline constexpr double kRuleContractTolerance = 1e-12;

// Index-level core, shared by frame densities and by joint grids that are
// indexed by cells rather than worlds.  `evidence` lists the atom indices
// that make up the conditioning event.
Strata stratify_values(std::span<const double> values, std::span<const std::size_t> evidence);

// Conditions `values` on `evidence` under `rule`.  The result has the same
// length as `values`, is zero outside the evidence, and attains 1 on the top
// stratum.  Throws ZeroPossibilityError when the evidence has possibility 0.
std::vector<double> transfer_values(std::span<const double> values,
                                    std::span<const std::size_t> evidence, const Rule& rule);

// Frame-level wrappers.
Strata stratify(const Density& density, const Event& evidence);
Density confidence_transfer(const Density& density, const Event& evidence, const Rule& rule);

// Conditional possibility P(target | evidence) and conditional confidence
// Co(target | evidence) = 1 - P(complement of target | evidence).
double conditional_measure(const Density& density, const Event& target, const Event& evidence,
                           const Rule& rule);
double conditional_necessity(const Density& density, const Event& target, const Event& evidence,
                             const Rule& rule);

}  // namespace poscop
