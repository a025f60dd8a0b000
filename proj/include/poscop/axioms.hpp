#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/conditioning.hpp"
#include "poscop/logic.hpp"
#include "poscop/possibility.hpp"

namespace poscop {

// Additive tolerance for every axiom inequality (decimal inputs live on a
// binary-float grid, so comparisons need a little slack).
inline constexpr double kAxiomSlack = 1e-9;

// At most this many concrete witnesses are stored per failed check; the
// violation_count still reports the full tally.
inline constexpr std::size_t kMaxWitnesses = 16;

// A concrete counterexample: the events involved (world-set bitmasks in hex,
// empty when the slot does not apply) and both sides of the violated
// inequality, re-checkable by evaluation.
struct AxiomWitness {
  std::string axiom;
  std::string beta_hex;
  std::string gamma_hex;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct AxiomCheck {
  std::string axiom;
  bool pass = true;
  std::size_t checked = 0;
  std::size_t violation_count = 0;
  std::vector<AxiomWitness> violations;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;

  bool all_pass() const;
  const AxiomCheck* find(std::string_view axiom) const;
};

// Serializes a report as text certificates: one status line per check and one
// line per stored witness (axiom id, events as bitmasks, both sides).
std::string format_certificates(const AxiomReport& report);

// Checks the conditioning axioms of `cond` against `prior` and the evidence:
//   D1  cond is a valid possibility density;
//   D2  for all event pairs (b, g): if Co(a implies b) >= Co(a implies g)
//       then Co(b|a) - Co(g|a) >= Co(a implies b) - Co(a implies g);
//   D3  for all events b: Co(b|a) >= Co(b) - Co(not a);
// where Co(.|a) is taken from `cond` and the unconditional values from
// `prior`.  Frames with at most 3 primitives are checked exhaustively over
// all events; larger frames use seeded randomized sampling with at least
// `samples` pairs.  Throws ZeroPossibilityError when the evidence has prior
// possibility 0 and FrameMismatchError on mixed frames.
AxiomReport check_d_axioms(const Density& prior, const Event& alpha, const Density& cond,
                           std::uint64_t seed = 0x9e3779b97f4a7c15ull,
                           std::size_t samples = 10000);

// Entailment criterion: gamma is accepted given alpha iff
// Co(alpha implies gamma) > Co(not alpha), which matches Co(gamma|alpha) > 0
// under Dempster conditioning.  Undefined (ZeroPossibilityError) when the
// evidence has possibility 0.
bool rott_entails(const Density& d, const Event& alpha, const Event& gamma);
bool rott_entails(const Density& d, const Formula& alpha, const Formula& gamma);

// Decides whether `cond` is reachable from `prior` by confidence transfer on
// `alpha`, and if so returns the unique coefficient vector: cond must vanish
// outside the evidence, the per-stratum offsets cond - prior must be constant
// on each stratum, non-negative, non-decreasing, and reach 1 - P(alpha) on
// the top stratum (all within kAxiomSlack).  Returns nullopt otherwise.
std::optional<std::vector<double>> recover_coefficients(const Density& prior, const Event& alpha,
                                                        const Density& cond);

// Possibility values for a mutually exclusive partition: the maximum must be
// 1 and every value must lie in [0,1] (tolerance kDensityTolerance).
struct MarginalSpec {
  std::vector<std::string> labels;
  std::vector<double> values;

  explicit MarginalSpec(std::vector<double> values);
  MarginalSpec(std::vector<std::string> labels, std::vector<double> values);

  std::size_t size() const { return values.size(); }
};

// Row-major matrix of joint possibility values, cell (i, j) = P(a_i and b_j).
// The maximum over all cells must be 1 and every cell must lie in [0,1].
class JointGrid {
 public:
  JointGrid(std::size_t rows, std::size_t cols, std::vector<double> cells);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  std::span<const double> cells() const { return cells_; }

  friend bool operator==(const JointGrid&, const JointGrid&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

// The joint grid induced by belief independence: cell (i, j) is the product
// of the two marginal values.
JointGrid independence_product(const MarginalSpec& a, const MarginalSpec& b);

// Checks belief independence of the grid under `rule`: conditioning the
// n*m-cell density induced by the grid on any non-empty union of b-columns
// with positive possibility must leave every row marginal unchanged
// (within kAxiomSlack), and symmetrically for unions of a-rows.  The report
// carries one check per direction ("alpha_given_beta", "beta_given_alpha").
AxiomReport verify_independence(const JointGrid& grid, const MarginalSpec& a,
                                const MarginalSpec& b, const Rule& rule);

// Exhaustive search over all 2x2 joints whose cells lie on the lattice
// {0, res, 2*res, ..., 1}, have maximum 1, and whose row/column maxima match
// the marginals; returns the lexicographically first grid passing
// verify_independence, or nullopt when none exists.  Requires 2x2 specs and
// a resolution that divides 1 evenly.
std::optional<JointGrid> search_independent_joint(const MarginalSpec& a, const MarginalSpec& b,
                                                  const Rule& rule, double resolution);

// Same search, but collects every passing grid (used to check uniqueness of
// the product joint on the lattice).
std::vector<JointGrid> all_independent_joints(const MarginalSpec& a, const MarginalSpec& b,
                                              const Rule& rule, double resolution);

}  // namespace poscop
