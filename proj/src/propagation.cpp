#include "poscop/propagation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

namespace poscop {

namespace {

constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> mask_variables(VarMask mask) {
  std::vector<std::size_t> vars;
  while (mask != 0) {
    vars.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return vars;
}

std::string mask_label(const Frame& frame, VarMask mask) {
  std::string out = "{";
  bool first = true;
  for (const std::size_t v : mask_variables(mask)) {
    if (!first) out += ",";
    out += frame.name(static_cast<std::uint32_t>(v));
    first = false;
  }
  return out + "}";
}

}  // namespace

// --- potentials -----------------------------------------------------------

Potential::Potential(Frame frame, VarMask scope, std::vector<double> table)
    : frame_(std::move(frame)), scope_(scope), table_(std::move(table)) {
  if (frame_.size() > kMaxEnumerablePrimitives)
    throw CapacityError("potentials support at most " +
                        std::to_string(kMaxEnumerablePrimitives) + " primitives");
  if (scope_ != 0 && (scope_ >> frame_.size()) != 0)
    throw ModelError("potential scope mentions primitives outside the frame");
  const std::size_t expected = std::size_t{1} << std::popcount(scope_);
  if (table_.size() != expected)
    throw DimensionMismatchError("potential table has " + std::to_string(table_.size()) +
                                 " entries, expected " + std::to_string(expected));
  for (const double v : table_)
    if (v < -kDensityTolerance || v > 1.0 + kDensityTolerance)
      throw InvalidDensityError("potential value " + std::to_string(v) + " outside [0,1]");
}

Potential Potential::ones(Frame frame, VarMask scope) {
  const std::size_t size = std::size_t{1} << std::popcount(scope);
  return Potential(std::move(frame), scope, std::vector<double>(size, 1.0));
}

Potential Potential::observation(Frame frame, Literal literal) {
  if (literal.variable >= frame.size())
    throw ModelError("observation variable index out of range");
  std::vector<double> table = literal.value ? std::vector<double>{1.0, 0.0}
                                            : std::vector<double>{0.0, 1.0};
  return Potential(std::move(frame), VarMask{1} << literal.variable, std::move(table));
}

std::vector<std::size_t> Potential::variables() const { return mask_variables(scope_); }

Potential combine(const Potential& g, const Potential& k) {
  if (!(g.frame() == k.frame())) throw FrameMismatchError("potentials use different frames");
  const VarMask united = g.scope() | k.scope();
  const std::vector<std::size_t> vars = mask_variables(united);
  const std::size_t n = vars.size();

  // Weight of each union position (0 = most significant) in each operand's
  // own index space; 0 when the variable is absent from that operand.
  std::vector<std::size_t> g_weight(n, 0), k_weight(n, 0);
  const std::vector<std::size_t> gv = g.variables();
  const std::vector<std::size_t> kv = k.variables();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    const std::size_t pos =
        static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), gv[i]) - vars.begin());
    g_weight[pos] = std::size_t{1} << (gv.size() - 1 - i);
  }
  for (std::size_t i = 0; i < kv.size(); ++i) {
    const std::size_t pos =
        static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), kv[i]) - vars.begin());
    k_weight[pos] = std::size_t{1} << (kv.size() - 1 - i);
  }

  std::vector<double> table(std::size_t{1} << n, 0.0);
  bool any_nonzero = false;
  for (std::size_t c = 0; c < table.size(); ++c) {
    std::size_t gi = 0, ki = 0;
    for (std::size_t p = 0; p < n; ++p) {
      if (((c >> (n - 1 - p)) & 1u) == 0) continue;
      gi += g_weight[p];
      ki += k_weight[p];
    }
    const double v = g.at(gi) * k.at(ki);
    if (v != 0.0) any_nonzero = true;
    table[c] = v;
  }
  if (!any_nonzero)
    throw NotCombinableError("potentials are not combinable: every product is 0, so the "
                             "evidence is impossible");
  return Potential(g.frame(), united, std::move(table));
}

Potential marginalize(const Potential& g, VarMask target) {
  if ((target & g.scope()) != target)
    throw DimensionMismatchError("marginalization target is not a subset of the scope");
  if (target == g.scope()) return g;

  const std::vector<std::size_t> gv = g.variables();
  const std::vector<std::size_t> tv = mask_variables(target);
  std::vector<std::size_t> t_weight(gv.size(), 0);
  for (std::size_t i = 0; i < gv.size(); ++i) {
    const auto it = std::lower_bound(tv.begin(), tv.end(), gv[i]);
    if (it == tv.end() || *it != gv[i]) continue;
    const std::size_t pos = static_cast<std::size_t>(it - tv.begin());
    t_weight[i] = std::size_t{1} << (tv.size() - 1 - pos);
  }

  std::vector<double> table(std::size_t{1} << tv.size(), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) {
    std::size_t ti = 0;
    for (std::size_t i = 0; i < gv.size(); ++i)
      if ((c >> (gv.size() - 1 - i)) & 1u) ti += t_weight[i];
    table[ti] = std::max(table[ti], g.at(c));
  }
  return Potential(g.frame(), target, std::move(table));
}

std::string format_potential(const Potential& g, int precision) {
  const Frame& frame = g.frame();
  const std::vector<std::size_t> vars = g.variables();
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision);

  if (vars.empty()) {
    out << "value\n" << g.at(0) << "\n";
    return out.str();
  }

  std::vector<std::size_t> widths;
  for (const std::size_t v : vars) {
    const std::string& name = frame.name(static_cast<std::uint32_t>(v));
    widths.push_back(name.size());
    out << name << ' ';
  }
  out << "| value\n";
  for (std::size_t c = 0; c < g.size(); ++c) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const bool truth = ((c >> (vars.size() - 1 - i)) & 1u) == 0;
      out << std::left << std::setw(static_cast<int>(widths[i])) << (truth ? 'T' : 'F') << ' ';
    }
    out << "| " << g.at(c) << "\n";
  }
  return out.str();
}

// --- trees ------------------------------------------------------------------

MarkovTree::MarkovTree(Frame frame, std::vector<VarMask> node_vars,
                       std::vector<Potential> potentials,
                       std::vector<std::pair<std::size_t, std::size_t>> edges)
    : frame_(std::move(frame)),
      vars_(std::move(node_vars)),
      potentials_(std::move(potentials)),
      edges_(std::move(edges)) {
  const std::size_t n = vars_.size();
  if (n == 0) throw ModelError("a Markov tree needs at least one node");
  if (potentials_.size() != n)
    throw DimensionMismatchError("a Markov tree needs exactly one potential per node");
  for (std::size_t i = 0; i < n; ++i) {
    if (vars_[i] == 0) throw ModelError("tree node " + std::to_string(i) + " has no variables");
    if ((vars_[i] >> frame_.size()) != 0)
      throw ModelError("tree node " + std::to_string(i) + " mentions primitives outside the frame");
    if (!(potentials_[i].frame() == frame_))
      throw FrameMismatchError("node potential uses a different frame");
    if ((potentials_[i].scope() & vars_[i]) != potentials_[i].scope())
      throw ModelError("the potential of node " + std::to_string(i) + " exceeds the node's scope");
  }
  if (edges_.size() != n - 1)
    throw ModelError("a tree with " + std::to_string(n) + " nodes needs " + std::to_string(n - 1) +
                     " edges, got " + std::to_string(edges_.size()));
  adjacency_.assign(n, {});
  for (const auto& [a, b] : edges_) {
    if (a >= n || b >= n) throw ModelError("tree edge endpoint out of range");
    if (a == b) throw ModelError("tree edge may not be a self-loop");
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack = {0};
  seen[0] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    ++reached;
    for (const std::size_t w : adjacency_[u])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  if (reached != n) throw ModelError("the tree edges do not connect all nodes");
}

MarkovTree MarkovTree::with_potential(std::size_t id, Potential p) const {
  if (id >= node_count()) throw ModelError("node id out of range");
  std::vector<Potential> potentials = potentials_;
  potentials[id] = std::move(p);
  return MarkovTree(frame_, vars_, std::move(potentials), edges_);
}

bool check_markov_property(const MarkovTree& tree) {
  const std::size_t n = tree.node_count();
  for (std::size_t v = 0; v < tree.frame().size(); ++v) {
    const VarMask bit = VarMask{1} << v;
    std::vector<char> holds(n, 0);
    std::size_t total = 0;
    std::size_t start = kNoNode;
    for (std::size_t i = 0; i < n; ++i)
      if (tree.vars_of(i) & bit) {
        holds[i] = 1;
        ++total;
        if (start == kNoNode) start = i;
      }
    if (total <= 1) continue;

    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      ++reached;
      for (const std::size_t w : tree.neighbors(u))
        if (holds[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    if (reached != total) return false;
  }
  return true;
}

// --- construction --------------------------------------------------------------

MarkovTree build_markov_tree(const Frame& frame, std::span<const VarMask> families) {
  if (families.empty()) throw ModelError("at least one family is required");
  if (frame.size() > kMaxEnumerablePrimitives)
    throw CapacityError("tree construction supports at most " +
                        std::to_string(kMaxEnumerablePrimitives) + " primitives");

  const VarMask all = (VarMask{1} << frame.size()) - 1;
  VarMask covered = 0;
  for (const VarMask f : families) {
    if (f == 0) throw ModelError("families must be non-empty");
    if ((f >> frame.size()) != 0) throw ModelError("family mentions primitives outside the frame");
    covered |= f;
  }
  if (covered != all) throw ModelError("the families do not cover the frame");

  struct Entry {
    VarMask vars;
    std::size_t node;
  };
  std::vector<Entry> active;
  std::vector<VarMask> node_vars(families.begin(), families.end());
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < families.size(); ++i) active.push_back({families[i], i});

  VarMask remaining = all;
  while (remaining != 0) {
    // One-step look-ahead: eliminate the variable with the smallest merged
    // clique; ties fall to the earliest variable in declaration order.
    std::size_t best_var = 0;
    int best_size = std::numeric_limits<int>::max();
    for (std::size_t v = 0; v < frame.size(); ++v) {
      if (!(remaining & (VarMask{1} << v))) continue;
      VarMask clique = 0;
      for (const Entry& e : active)
        if (e.vars & (VarMask{1} << v)) clique |= e.vars;
      const int size = std::popcount(clique);
      if (size < best_size) {
        best_size = size;
        best_var = v;
      }
    }

    const VarMask vbit = VarMask{1} << best_var;
    VarMask clique = 0;
    for (const Entry& e : active)
      if (e.vars & vbit) clique |= e.vars;

    // Reuse the earliest node whose pending variable set is exactly the
    // clique; otherwise add a fresh node for it.
    std::size_t target = kNoNode;
    for (const Entry& e : active)
      if (e.vars == clique && (target == kNoNode || e.node < target)) target = e.node;
    if (target == kNoNode) {
      target = node_vars.size();
      node_vars.push_back(clique);
    }

    std::vector<Entry> next;
    next.reserve(active.size());
    for (const Entry& e : active) {
      if (!(e.vars & vbit)) {
        next.push_back(e);
        continue;
      }
      if (e.node != target) edges.push_back({e.node, target});
    }
    const VarMask rest = clique & ~vbit;
    if (rest != 0) next.push_back({rest, target});
    active = std::move(next);
    remaining &= ~vbit;
  }

  // Variable-disjoint family groups end up as separate subtrees; stitch them
  // together by their lowest node ids (safe: no shared variables).
  std::vector<std::size_t> parent(node_vars.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < node_vars.size(); ++i) {
    const std::size_t r = find(i);
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
  }
  if (roots.size() > 1) {
    // Lowest node id per component, ascending.
    std::vector<std::size_t> low(roots.size(), kNoNode);
    for (std::size_t i = 0; i < node_vars.size(); ++i) {
      const std::size_t r = find(i);
      const std::size_t pos = static_cast<std::size_t>(
          std::find(roots.begin(), roots.end(), r) - roots.begin());
      low[pos] = std::min(low[pos], i);
    }
    std::sort(low.begin(), low.end());
    for (std::size_t i = 1; i < low.size(); ++i) edges.push_back({low[0], low[i]});
  }

  std::vector<Potential> potentials;
  potentials.reserve(node_vars.size());
  for (const VarMask vars : node_vars) potentials.push_back(Potential::ones(frame, vars));
  return MarkovTree(frame, std::move(node_vars), std::move(potentials), std::move(edges));
}

namespace {

Potential family_potential(const Frame& frame, const NodeTable& node) {
  VarMask scope = VarMask{1} << node.variable;
  for (const std::size_t p : node.parents) scope |= VarMask{1} << p;
  const std::vector<std::size_t> vars = mask_variables(scope);

  // Literal bit (0 = T) of variable v inside scope configuration c.
  auto bit_of = [&](std::size_t c, std::size_t v) -> std::size_t {
    const std::size_t pos = static_cast<std::size_t>(
        std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
    return (c >> (vars.size() - 1 - pos)) & 1u;
  };

  std::vector<double> table(std::size_t{1} << vars.size());
  for (std::size_t c = 0; c < table.size(); ++c) {
    std::size_t cfg = 0;
    for (const std::size_t p : node.parents) cfg = (cfg << 1) | bit_of(c, p);
    table[c] = node.rows[cfg][bit_of(c, node.variable)];
  }
  return Potential(frame, scope, std::move(table));
}

}  // namespace

MarkovTree tree_for_net(const PossibilisticNet& net) {
  const Frame& frame = net.frame();
  std::vector<VarMask> families;
  families.reserve(net.nodes().size());
  for (const NodeTable& node : net.nodes()) {
    VarMask f = VarMask{1} << node.variable;
    for (const std::size_t p : node.parents) f |= VarMask{1} << p;
    families.push_back(f);
  }
  MarkovTree tree = build_markov_tree(frame, families);
  for (std::size_t i = 0; i < net.nodes().size(); ++i)
    tree = tree.with_potential(i, family_potential(frame, net.nodes()[i]));
  return tree;
}

// --- evidence and propagation -----------------------------------------------------

MarkovTree attach_evidence(const MarkovTree& tree, std::span<const Literal> evidence) {
  if (evidence.empty()) return tree;
  const Frame& frame = tree.frame();

  std::vector<VarMask> node_vars;
  std::vector<Potential> potentials;
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    node_vars.push_back(tree.vars_of(i));
    potentials.push_back(tree.potential_of(i));
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges = tree.edges();

  for (const Literal& literal : evidence) {
    if (literal.variable >= frame.size())
      throw ModelError("evidence variable index out of range");
    const VarMask bit = VarMask{1} << literal.variable;
    std::size_t host = kNoNode;
    int host_size = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < node_vars.size(); ++i) {
      if (!(node_vars[i] & bit)) continue;
      const int size = std::popcount(node_vars[i]);
      if (size < host_size) {
        host_size = size;
        host = i;
      }
    }
    if (host == kNoNode)
      throw ModelError("evidence variable '" +
                       frame.name(static_cast<std::uint32_t>(literal.variable)) +
                       "' occurs in no tree node");
    edges.push_back({host, node_vars.size()});
    node_vars.push_back(bit);
    potentials.push_back(Potential::observation(frame, literal));
  }
  return MarkovTree(frame, std::move(node_vars), std::move(potentials), std::move(edges));
}

namespace {

// Combines a node's own potential (extended to the node's full variable set
// when narrower) with the messages of all its children.
Potential gather(const MarkovTree& tree, std::size_t u, std::size_t parent) {
  Potential pot = tree.potential_of(u);
  if (pot.scope() != tree.vars_of(u))
    pot = combine(pot, Potential::ones(tree.frame(), tree.vars_of(u)));
  for (const std::size_t w : tree.neighbors(u)) {
    if (w == parent) continue;
    const Potential message =
        marginalize(gather(tree, w, u), tree.vars_of(w) & tree.vars_of(u));
    pot = combine(pot, message);
  }
  return pot;
}

}  // namespace

Potential collect(const MarkovTree& tree, std::size_t root) {
  if (root >= tree.node_count()) throw ModelError("collect root id out of range");
  return gather(tree, root, kNoNode);
}

QueryResult query_target(const MarkovTree& tree, std::size_t target,
                         std::span<const Literal> evidence) {
  const Frame& frame = tree.frame();
  if (target >= frame.size()) throw ModelError("target variable index out of range");

  const MarkovTree ready = attach_evidence(tree, evidence);
  const VarMask bit = VarMask{1} << target;
  std::size_t root = kNoNode;
  int best = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < ready.node_count(); ++i) {
    if (!(ready.vars_of(i) & bit)) continue;
    const int size = std::popcount(ready.vars_of(i));
    if (size < best) {
      best = size;
      root = i;
    }
  }
  if (root == kNoNode)
    throw ModelError("target variable '" + frame.name(static_cast<std::uint32_t>(target)) +
                     "' occurs in no tree node");

  const Potential result = marginalize(collect(ready, root), bit);
  const double top = std::max(result.at(0), result.at(1));
  if (top <= 0.0) throw ImpossibleEvidenceError("evidence has possibility 0");
  return {result.at(0) / top, result.at(1) / top};
}

std::string format_tree(const MarkovTree& tree) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tree.node_count(); ++i)
    out << "node " << i << ": " << mask_label(tree.frame(), tree.vars_of(i)) << "\n";
  std::vector<std::pair<std::size_t, std::size_t>> edges = tree.edges();
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) out << "edge " << a << " - " << b << "\n";
  return out.str();
}

}  // namespace poscop
