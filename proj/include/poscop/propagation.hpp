#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poscop/error.hpp"
#include "poscop/logic.hpp"
#include "poscop/network.hpp"

namespace poscop {

// A set of frame primitives, bit i = primitive i.
using VarMask = std::uint32_t;

// A single observed variable assignment; value true means T.
struct Literal {
  std::size_t variable = 0;
  bool value = true;
};

// A table over the 2^|scope| literal configurations of a variable subset.
// Configurations list the scope's variables in frame order with the first
// (lowest-index) variable most significant and T = 0, so a full-scope
// potential is indexed exactly like the frame's worlds.  Values lie in [0,1].
class Potential {
 public:
  Potential(Frame frame, VarMask scope, std::vector<double> table);

  // The multiplicative identity on `scope`.
  static Potential ones(Frame frame, VarMask scope);
  // Singleton-scope potential assigning 1 to the observed literal, 0 to the
  // other.
  static Potential observation(Frame frame, Literal literal);

  const Frame& frame() const { return frame_; }
  VarMask scope() const { return scope_; }
  std::span<const double> table() const { return table_; }
  double at(std::size_t config) const { return table_[config]; }
  std::size_t size() const { return table_.size(); }

  // The scope's variables in ascending frame order.
  std::vector<std::size_t> variables() const;

  friend bool operator==(const Potential& a, const Potential& b) {
    return a.frame_ == b.frame_ && a.scope_ == b.scope_ && a.table_ == b.table_;
  }

 private:
  Frame frame_;
  VarMask scope_;
  std::vector<double> table_;
};

// Pointwise product on the union scope.  Throws NotCombinableError when every
// output value is 0 (contradictory information) and FrameMismatchError on
// mixed frames.
Potential combine(const Potential& g, const Potential& k);

// Max-projection onto `target`, which must be a subset of the scope
// (DimensionMismatchError otherwise).  The empty target yields the scalar
// maximum.
Potential marginalize(const Potential& g, VarMask target);

// Aligned table rendering: one column per scope variable, then the value with
// `precision` fraction digits.
std::string format_potential(const Potential& g, int precision = 2);

// A tree of variable-set nodes, each carrying one potential whose scope is
// contained in the node's variables.  The constructor checks tree-ness
// (exactly node_count - 1 edges, connected, no self-loops); whether the
// variable sets satisfy the Markov property is a separate query.
class MarkovTree {
 public:
  MarkovTree(Frame frame, std::vector<VarMask> node_vars, std::vector<Potential> potentials,
             std::vector<std::pair<std::size_t, std::size_t>> edges);

  const Frame& frame() const { return frame_; }
  std::size_t node_count() const { return vars_.size(); }
  VarMask vars_of(std::size_t id) const { return vars_[id]; }
  const Potential& potential_of(std::size_t id) const { return potentials_[id]; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  // Neighbor ids in ascending order (the deterministic combine order).
  const std::vector<std::size_t>& neighbors(std::size_t id) const { return adjacency_[id]; }

  // Functional update: the same tree with node `id` carrying `p`.
  MarkovTree with_potential(std::size_t id, Potential p) const;

 private:
  Frame frame_;
  std::vector<VarMask> vars_;
  std::vector<Potential> potentials_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// True iff every primitive's nodes induce a connected subtree.
bool check_markov_property(const MarkovTree& tree);

// Builds a Markov tree whose nodes include every family (possibly inside
// larger added nodes): sequential variable elimination with a one-step
// minimum-clique-size look-ahead, ties broken by frame declaration order.
// Family i is node i; added nodes carry all-ones potentials and come after.
// The families must be non-empty and cover the frame (ModelError otherwise).
MarkovTree build_markov_tree(const Frame& frame, std::span<const VarMask> families);

// The net's Markov tree: one family {variable} + parents per table, in
// declaration order, with the table's potential attached to its family node.
MarkovTree tree_for_net(const PossibilisticNet& net);

// A new tree with one observation leaf per literal, each linked to the
// smallest node containing its variable (ties by node id).  Throws ModelError
// when a variable occurs in no node.
MarkovTree attach_evidence(const MarkovTree& tree, std::span<const Literal> evidence);

// Collect propagation towards `root`: every node combines its own potential
// with its children's messages; a message is that combination marginalized to
// the child-parent separator.  Child messages are combined in ascending
// neighbor order.  NotCombinableError propagates (impossible evidence).
Potential collect(const MarkovTree& tree, std::size_t root);

struct QueryResult {
  double pi_true = 0.0;
  double pi_false = 0.0;
};

// Attaches the evidence, roots at the smallest node containing the target
// (ties by node id), collects, marginalizes to the target, and divides both
// values by their maximum.  Throws ModelError when the target is absent and
// ImpossibleEvidenceError (or NotCombinableError) when the evidence has
// possibility 0.
QueryResult query_target(const MarkovTree& tree, std::size_t target,
                         std::span<const Literal> evidence);

// Human-readable adjacency listing of a tree.
std::string format_tree(const MarkovTree& tree);

}  // namespace poscop
