#include "poscop/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace poscop {

// --- Rule -----------------------------------------------------------------

Rule::Rule(std::string name, Strategy strategy)
    : name_(std::move(name)), strategy_(std::move(strategy)) {}

Rule Rule::dempster() {
  return Rule("dempster", [](std::span<const double> levels, double constant) {
    std::vector<double> c(levels.size(), 0.0);
    const double top = levels.back();
    double previous = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      c[i] = (levels[i] - previous) * constant / top;
      previous = levels[i];
    }
    return c;
  });
}

Rule Rule::minimum() {
  return Rule("minimum", [](std::span<const double> levels, double constant) {
    std::vector<double> c(levels.size(), 0.0);
    c.back() = constant;
    return c;
  });
}

Rule Rule::yager() {
  return Rule("yager", [](std::span<const double> levels, double constant) {
    std::vector<double> c(levels.size(), 0.0);
    c.front() = constant;
    return c;
  });
}

Rule Rule::custom(std::string name, Strategy strategy) {
  return Rule(std::move(name), std::move(strategy));
}

Rule Rule::from_name(std::string_view name) {
  if (name == "dempster") return dempster();
  if (name == "minimum") return minimum();
  if (name == "yager") return yager();
  throw Error("unknown rule '" + std::string(name) +
              "' (expected dempster, minimum, or yager)");
}

std::vector<double> Rule::coefficients(const Strata& strata) const {
  if (strata.evidence_possibility() <= 0.0)
    throw ZeroPossibilityError("cannot condition on evidence with possibility 0");
  std::vector<double> c = strategy_(strata.levels, strata.normalization_constant());
  if (c.size() != strata.size())
    throw RuleContractError("rule '" + name_ + "' returned " + std::to_string(c.size()) +
                            " coefficients for " + std::to_string(strata.size()) + " strata");
  double sum = 0.0;
  for (double& value : c) {
    if (value < -kRuleContractTolerance)
      throw RuleContractError("rule '" + name_ + "' produced a negative coefficient " +
                              std::to_string(value));
    if (value < 0.0) value = 0.0;
    sum += value;
  }
  if (std::abs(sum - strata.normalization_constant()) > kRuleContractTolerance)
    throw RuleContractError("rule '" + name_ + "' coefficients sum to " + std::to_string(sum) +
                            ", expected " + std::to_string(strata.normalization_constant()));
  return c;
}

// --- index-level core -------------------------------------------------------

Strata stratify_values(std::span<const double> values, std::span<const std::size_t> evidence) {
  std::vector<std::size_t> order(evidence.begin(), evidence.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });

  Strata strata;
  for (std::size_t atom : order) {
    const double value = values[atom];
    if (strata.blocks.empty() || value - values[strata.blocks.back().front()] > kLevelTolerance) {
      strata.blocks.emplace_back();
      strata.levels.push_back(value);
    }
    strata.blocks.back().push_back(atom);
    strata.levels.back() = std::max(strata.levels.back(), value);
  }
  return strata;
}

std::vector<double> transfer_values(std::span<const double> values,
                                    std::span<const std::size_t> evidence, const Rule& rule) {
  const Strata strata = stratify_values(values, evidence);
  const std::vector<double> c = rule.coefficients(strata);

  std::vector<double> result(values.size(), 0.0);
  double carried = 0.0;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    carried += c[i];
    // The coefficients telescope to the normalization constant; substituting
    // the exact value on the top stratum cancels accumulated rounding so the
    // stratum attains 1 exactly, as the contract promises.
    if (i + 1 == strata.size()) carried = strata.normalization_constant();
    for (std::size_t atom : strata.blocks[i])
      result[atom] = std::min(values[atom] + carried, 1.0);
  }
  return result;
}

// --- frame-level wrappers ---------------------------------------------------

namespace {

std::vector<std::size_t> event_atoms(const Event& evidence) {
  std::vector<std::size_t> atoms;
  atoms.reserve(evidence.count());
  evidence.for_each([&](WorldIndex w) { atoms.push_back(w); });
  return atoms;
}

}  // namespace

Strata stratify(const Density& density, const Event& evidence) {
  if (!(density.frame() == evidence.frame()))
    throw FrameMismatchError("density and evidence use different frames");
  return stratify_values(density.values(), event_atoms(evidence));
}

Density confidence_transfer(const Density& density, const Event& evidence, const Rule& rule) {
  if (!(density.frame() == evidence.frame()))
    throw FrameMismatchError("density and evidence use different frames");
  return Density(density.frame(), transfer_values(density.values(), event_atoms(evidence), rule));
}

double conditional_measure(const Density& density, const Event& target, const Event& evidence,
                           const Rule& rule) {
  return measure(confidence_transfer(density, evidence, rule), target);
}

double conditional_necessity(const Density& density, const Event& target, const Event& evidence,
                             const Rule& rule) {
  return necessity(confidence_transfer(density, evidence, rule), target);
}

}  // namespace poscop
