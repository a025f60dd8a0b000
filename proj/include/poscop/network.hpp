#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/possibility.hpp"

namespace poscop {

// One node of a causal net: a variable, its parents (in the order declared by
// the model file, which fixes the row indexing), and one row per parent
// configuration.  Row indices encode the parents' literals with the first
// parent most significant and T = 0; each row holds the pair
// (value for var = T, value for var = F).  Roots have no parents and exactly
// one row.
struct NodeTable {
  std::size_t variable = 0;
  std::vector<std::size_t> parents;
  std::vector<std::array<double, 2>> rows;
};

// A validated possibilistic causal net: a DAG over the frame's primitives
// with one table per variable.  Every row's maximum must be exactly 1
// (tolerance kDensityTolerance) and all values must lie in [0,1].
class PossibilisticNet {
 public:
  PossibilisticNet(Frame frame, std::vector<NodeTable> nodes);

  const Frame& frame() const { return frame_; }
  // Tables in declaration order; this order also fixes the factor order of
  // the joint product and the family order for tree construction.
  const std::vector<NodeTable>& nodes() const { return nodes_; }

  const NodeTable& node_for(std::size_t variable) const;

 private:
  Frame frame_;
  std::vector<NodeTable> nodes_;
};

// Parses the model file format:
//   vars: B E A R W G
//   prior B: 1.0 1.0
//   cond A | B E:
//     T T : 1.0 0.05
//     ...
// '#' starts a comment; decimals carry at most 6 fraction digits; every
// variable appears in exactly one prior or cond line; every cond block lists
// each parent configuration exactly once.  Throws ParseError (with the line),
// UnknownPrimitiveError, or ModelError (cycles, missing declarations).
PossibilisticNet load_net(std::string_view text);

// Renders a net back into the model file format (canonical form).
std::string format_net(const PossibilisticNet& net);

// The chain product: for every world, the product of the per-node factors
// selected by the world's literals.  The result is a valid density (its
// maximum is 1).  Throws CapacityError beyond the enumerable frame cap.
Density joint_density(const PossibilisticNet& net);

// P(target | evidence) = P(target and evidence) / P(evidence) computed on a
// full joint density.  Throws ImpossibleEvidenceError when the evidence has
// possibility 0.
double conditional_from_joint(const Density& joint, const Event& target, const Event& evidence);

// Brute-force oracle: full-joint enumeration of the conditional.
double oracle_conditional(const PossibilisticNet& net, const Formula& target,
                          const Formula& evidence);

// The bundled six-variable alarm example (burglary, earthquake, alarm, radio
// report, and two phone calls).
std::string_view alarm_model_text();

}  // namespace poscop
