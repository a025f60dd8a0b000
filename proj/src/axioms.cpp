#include "poscop/axioms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace poscop {

// --- report plumbing --------------------------------------------------------

bool AxiomReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AxiomCheck& c) { return c.pass; });
}

const AxiomCheck* AxiomReport::find(std::string_view axiom) const {
  for (const AxiomCheck& check : checks)
    if (check.axiom == axiom) return &check;
  return nullptr;
}

namespace {

void record(AxiomCheck& check, AxiomWitness witness) {
  check.pass = false;
  ++check.violation_count;
  if (check.violations.size() < kMaxWitnesses) check.violations.push_back(std::move(witness));
}

std::string mask_hex(std::uint64_t mask) {
  std::ostringstream out;
  out << "0x" << std::hex << mask;
  return out.str();
}

}  // namespace

std::string format_certificates(const AxiomReport& report) {
  std::ostringstream out;
  for (const AxiomCheck& check : report.checks) {
    out << check.axiom << ": " << (check.pass ? "pass" : "FAIL") << " checked="
        << check.checked << " violations=" << check.violation_count << "\n";
    for (const AxiomWitness& w : check.violations) {
      out << "  " << w.axiom;
      if (!w.beta_hex.empty()) out << " beta=" << w.beta_hex;
      if (!w.gamma_hex.empty()) out << " gamma=" << w.gamma_hex;
      out << " lhs=" << format_value(w.lhs) << " rhs=" << format_value(w.rhs) << "  " << w.detail
          << "\n";
    }
  }
  return out.str();
}

// --- the conditioning axioms -------------------------------------------------

namespace {

// D1: the conditional must itself be a possibility density.  Densities built
// through the validating constructor always satisfy this; unchecked densities
// may not, and the report has to say so rather than trust the type.
void check_d1(AxiomCheck& d1, const Density& cond) {
  d1.checked = 1;
  double max = 0.0;
  const std::span<const double> values = cond.values();
  for (WorldIndex w = 0; w < values.size(); ++w) {
    const double v = values[w];
    if (v < -kDensityTolerance || v > 1.0 + kDensityTolerance)
      record(d1, {"D1", mask_hex(std::uint64_t{1} << w), "", v, v < 0.0 ? 0.0 : 1.0,
                  "conditional value outside [0,1]"});
    max = std::max(max, v);
  }
  if (std::abs(max - 1.0) > kDensityTolerance)
    record(d1, {"D1", "", "", max, 1.0, "conditional maximum is not 1"});
}

// Exhaustive event enumeration for frames of at most 3 primitives: bitmask
// tables give every event's possibility in O(1) after an O(2^worlds) sweep.
void check_d2_d3_exhaustive(AxiomCheck& d2, AxiomCheck& d3, const Density& prior,
                            const Event& alpha, const Density& cond) {
  const std::size_t wc = prior.frame().world_count();
  const std::uint32_t full = (std::uint32_t{1} << wc) - 1;

  std::vector<double> max_prior(full + 1, 0.0);
  std::vector<double> max_cond(full + 1, 0.0);
  for (std::uint32_t m = 1; m <= full; ++m) {
    const std::uint32_t low = m & (~m + 1);
    const int idx = std::countr_zero(m);
    max_prior[m] = std::max(prior[idx], max_prior[m ^ low]);
    max_cond[m] = std::max(cond[idx], max_cond[m ^ low]);
  }

  std::uint32_t am = 0;
  alpha.for_each([&](WorldIndex w) { am |= std::uint32_t{1} << w; });
  const double co_not_alpha = 1.0 - max_prior[am];

  // Per-event tables: Co(b|a), Co(b), and Co(a implies b) = 1 - P(a and not b).
  std::vector<double> co_cond(full + 1), co_prior(full + 1), co_implies(full + 1);
  for (std::uint32_t b = 0; b <= full; ++b) {
    co_cond[b] = 1.0 - max_cond[full & ~b];
    co_prior[b] = 1.0 - max_prior[full & ~b];
    co_implies[b] = 1.0 - max_prior[am & ~b];
  }

  for (std::uint32_t b = 0; b <= full; ++b) {
    for (std::uint32_t g = 0; g <= full; ++g) {
      if (co_implies[b] < co_implies[g]) continue;
      ++d2.checked;
      const double lhs = co_cond[b] - co_cond[g];
      const double rhs = co_implies[b] - co_implies[g];
      if (lhs < rhs - kAxiomSlack)
        record(d2, {"D2", mask_hex(b), mask_hex(g), lhs, rhs,
                    "Co(b|a) - Co(g|a) >= Co(a->b) - Co(a->g) violated"});
    }
  }

  for (std::uint32_t b = 0; b <= full; ++b) {
    ++d3.checked;
    const double lhs = co_cond[b];
    const double rhs = co_prior[b] - co_not_alpha;
    if (lhs < rhs - kAxiomSlack)
      record(d3, {"D3", mask_hex(b), "", lhs, rhs, "Co(b|a) >= Co(b) - Co(~a) violated"});
  }
}

// Randomized sampling for larger frames: a fixed pool of structurally
// interesting events plus seeded random events of mixed size.
void check_d2_d3_sampled(AxiomCheck& d2, AxiomCheck& d3, const Density& prior,
                         const Event& alpha, const Density& cond, std::uint64_t seed,
                         std::size_t samples) {
  const Frame& frame = prior.frame();
  const std::size_t wc = frame.world_count();
  std::mt19937_64 rng(seed);

  auto random_event = [&]() -> Event {
    const std::uint64_t cls = rng() % 5;
    std::vector<WorldIndex> worlds;
    if (cls == 0) {
      worlds.push_back(static_cast<WorldIndex>(rng() % wc));
    } else {
      for (WorldIndex w = 0; w < wc; ++w) {
        const std::uint64_t r = rng();
        if (cls == 1 ? (r % 8 == 0) : (r & 1)) worlds.push_back(w);
      }
    }
    return Event::of(frame, worlds);
  };

  const std::vector<Event> pool = {Event::none(frame), Event::all(frame), alpha,
                                   alpha.complement()};

  const double co_not_alpha = necessity(prior, alpha.complement());
  auto co_implies = [&](const Event& b) {
    return 1.0 - measure(prior, intersect(alpha, b.complement()));
  };

  auto check_d2_pair = [&](const Event& b, const Event& g) {
    const double ib = co_implies(b);
    const double ig = co_implies(g);
    if (ib < ig) return;
    ++d2.checked;
    const double lhs = necessity(cond, b) - necessity(cond, g);
    const double rhs = ib - ig;
    if (lhs < rhs - kAxiomSlack)
      record(d2, {"D2", b.to_hex(), g.to_hex(), lhs, rhs,
                  "Co(b|a) - Co(g|a) >= Co(a->b) - Co(a->g) violated"});
  };
  auto check_d3_event = [&](const Event& b) {
    ++d3.checked;
    const double lhs = necessity(cond, b);
    const double rhs = necessity(prior, b) - co_not_alpha;
    if (lhs < rhs - kAxiomSlack)
      record(d3, {"D3", b.to_hex(), "", lhs, rhs, "Co(b|a) >= Co(b) - Co(~a) violated"});
  };

  std::size_t d2_pairs = 0;
  for (const Event& b : pool)
    for (const Event& g : pool) {
      check_d2_pair(b, g);
      ++d2_pairs;
    }
  while (d2_pairs < samples) {
    check_d2_pair(random_event(), random_event());
    ++d2_pairs;
  }

  std::size_t d3_events = 0;
  for (const Event& b : pool) {
    check_d3_event(b);
    ++d3_events;
  }
  while (d3_events < samples) {
    check_d3_event(random_event());
    ++d3_events;
  }
}

}  // namespace

AxiomReport check_d_axioms(const Density& prior, const Event& alpha, const Density& cond,
                           std::uint64_t seed, std::size_t samples) {
  if (!(prior.frame() == alpha.frame()) || !(prior.frame() == cond.frame()))
    throw FrameMismatchError("prior, evidence, and conditional must share one frame");
  if (measure(prior, alpha) <= 0.0)
    throw ZeroPossibilityError("axiom check requires evidence with positive possibility");

  AxiomReport report;
  report.checks.resize(3);
  report.checks[0].axiom = "D1";
  report.checks[1].axiom = "D2";
  report.checks[2].axiom = "D3";

  check_d1(report.checks[0], cond);
  if (prior.frame().size() <= 3)
    check_d2_d3_exhaustive(report.checks[1], report.checks[2], prior, alpha, cond);
  else
    check_d2_d3_sampled(report.checks[1], report.checks[2], prior, alpha, cond, seed, samples);
  return report;
}

// --- entailment ---------------------------------------------------------------

bool rott_entails(const Density& d, const Event& alpha, const Event& gamma) {
  if (!(d.frame() == alpha.frame()) || !(d.frame() == gamma.frame()))
    throw FrameMismatchError("density and events must share one frame");
  if (measure(d, alpha) <= 0.0)
    throw ZeroPossibilityError("entailment is undefined when the premise has possibility 0");
  const double lhs = necessity(d, unite(alpha.complement(), gamma));
  const double rhs = necessity(d, alpha.complement());
  return lhs > rhs;
}

bool rott_entails(const Density& d, const Formula& alpha, const Formula& gamma) {
  return rott_entails(d, models(alpha), models(gamma));
}

// --- coefficient recovery ------------------------------------------------------

std::optional<std::vector<double>> recover_coefficients(const Density& prior, const Event& alpha,
                                                        const Density& cond) {
  if (!(prior.frame() == alpha.frame()) || !(prior.frame() == cond.frame()))
    throw FrameMismatchError("prior, evidence, and conditional must share one frame");

  const Strata strata = stratify(prior, alpha);
  if (strata.evidence_possibility() <= 0.0)
    throw ZeroPossibilityError("recovery requires evidence with positive possibility");

  // Confidence transfer zeroes everything outside the evidence, exactly.
  const std::size_t wc = prior.frame().world_count();
  for (WorldIndex w = 0; w < wc; ++w)
    if (!alpha.contains(w) && cond[w] != 0.0) return std::nullopt;

  // The offset cond - prior must be constant on each stratum; take the
  // largest-prior atom as the representative so the top stratum pins the
  // offset to 1 - P(alpha) exactly.
  std::vector<double> offsets(strata.size());
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto& block = strata.blocks[i];
    const std::size_t rep = block.back();
    const double offset = cond[static_cast<WorldIndex>(rep)] - prior[static_cast<WorldIndex>(rep)];
    for (const std::size_t atom : block) {
      const double here =
          cond[static_cast<WorldIndex>(atom)] - prior[static_cast<WorldIndex>(atom)];
      if (std::abs(here - offset) > kAxiomSlack) return std::nullopt;
    }
    offsets[i] = offset;
  }

  if (offsets.front() < -kAxiomSlack) return std::nullopt;
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] < offsets[i - 1] - kAxiomSlack) return std::nullopt;
  if (std::abs(offsets.back() - strata.normalization_constant()) > kAxiomSlack)
    return std::nullopt;

  std::vector<double> c(offsets.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    c[i] = std::max(offsets[i] - previous, 0.0);
    previous = offsets[i];
  }
  return c;
}

// --- belief independence --------------------------------------------------------

namespace {

void validate_marginal(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (values.empty()) throw InvalidDensityError("a marginal needs at least one value");
  if (labels.size() != values.size())
    throw DimensionMismatchError("marginal has " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(values.size()) + " values");
  double max = 0.0;
  for (const double v : values) {
    if (v < -kDensityTolerance || v > 1.0 + kDensityTolerance)
      throw InvalidDensityError("marginal value " + std::to_string(v) + " outside [0,1]");
    max = std::max(max, v);
  }
  if (std::abs(max - 1.0) > kDensityTolerance)
    throw InvalidDensityError("marginal maximum is " + std::to_string(max) + " (expected 1)");
}

}  // namespace

MarginalSpec::MarginalSpec(std::vector<double> values_in)
    : labels(), values(std::move(values_in)) {
  labels.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) labels.push_back(std::to_string(i + 1));
  validate_marginal(labels, values);
}

MarginalSpec::MarginalSpec(std::vector<std::string> labels_in, std::vector<double> values_in)
    : labels(std::move(labels_in)), values(std::move(values_in)) {
  validate_marginal(labels, values);
}

JointGrid::JointGrid(std::size_t rows, std::size_t cols, std::vector<double> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionMismatchError("a joint grid cannot be empty");
  if (cells_.size() != rows_ * cols_)
    throw DimensionMismatchError("grid has " + std::to_string(cells_.size()) + " cells, expected " +
                                 std::to_string(rows_ * cols_));
  double max = 0.0;
  for (const double v : cells_) {
    if (v < -kDensityTolerance || v > 1.0 + kDensityTolerance)
      throw InvalidDensityError("grid cell " + std::to_string(v) + " outside [0,1]");
    max = std::max(max, v);
  }
  if (std::abs(max - 1.0) > kDensityTolerance)
    throw InvalidDensityError("grid maximum is " + std::to_string(max) + " (expected 1)");
}

JointGrid independence_product(const MarginalSpec& a, const MarginalSpec& b) {
  std::vector<double> cells;
  cells.reserve(a.size() * b.size());
  for (const double va : a.values)
    for (const double vb : b.values) cells.push_back(va * vb);
  return JointGrid(a.size(), b.size(), std::move(cells));
}

namespace {

constexpr std::size_t kMaxMarginalSize = 16;

std::string union_label(const std::vector<std::string>& labels, std::uint32_t subset) {
  std::string out;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (!(subset & (std::uint32_t{1} << j))) continue;
    if (!out.empty()) out += " v ";
    out += labels[j];
  }
  return out;
}

// One direction of the independence check: condition the cell density on
// every non-empty union of `outer` lines and require the `inner` marginals to
// survive unchanged.  `cell` maps (inner index, outer index) to the flat cell.
template <class CellAt>
void check_direction(AxiomCheck& check, std::span<const double> cells, const Rule& rule,
                     const MarginalSpec& inner, const MarginalSpec& outer, CellAt cell_at) {
  for (std::uint32_t subset = 1; subset < (std::uint32_t{1} << outer.size()); ++subset) {
    std::vector<std::size_t> atoms;
    double evidence_possibility = 0.0;
    for (std::size_t j = 0; j < outer.size(); ++j) {
      if (!(subset & (std::uint32_t{1} << j))) continue;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        atoms.push_back(cell_at(i, j));
        evidence_possibility = std::max(evidence_possibility, cells[cell_at(i, j)]);
      }
    }
    if (evidence_possibility <= 0.0) continue;

    const std::vector<double> cond = transfer_values(cells, atoms, rule);
    for (std::size_t i = 0; i < inner.size(); ++i) {
      double value = 0.0;
      for (std::size_t j = 0; j < outer.size(); ++j)
        value = std::max(value, cond[cell_at(i, j)]);
      ++check.checked;
      if (std::abs(value - inner.values[i]) > kAxiomSlack)
        record(check, {check.axiom, mask_hex(subset), "", value, inner.values[i],
                       "P(" + inner.labels[i] + " | " + union_label(outer.labels, subset) +
                           ") differs from the marginal"});
    }
  }
}

}  // namespace

AxiomReport verify_independence(const JointGrid& grid, const MarginalSpec& a,
                                const MarginalSpec& b, const Rule& rule) {
  if (grid.rows() != a.size() || grid.cols() != b.size())
    throw DimensionMismatchError("grid is " + std::to_string(grid.rows()) + "x" +
                                 std::to_string(grid.cols()) + " but the specs are " +
                                 std::to_string(a.size()) + " and " + std::to_string(b.size()));
  if (a.size() > kMaxMarginalSize || b.size() > kMaxMarginalSize)
    throw Error("marginals larger than " + std::to_string(kMaxMarginalSize) +
                " are not supported by the exhaustive union check");

  AxiomReport report;
  report.checks.resize(2);
  report.checks[0].axiom = "alpha_given_beta";
  report.checks[1].axiom = "beta_given_alpha";

  const std::size_t m = b.size();
  check_direction(report.checks[0], grid.cells(), rule, a, b,
                  [m](std::size_t i, std::size_t j) { return i * m + j; });
  check_direction(report.checks[1], grid.cells(), rule, b, a,
                  [m](std::size_t i, std::size_t j) { return j * m + i; });
  return report;
}

namespace {

// Enumerates, in lexicographic cell order, every 2x2 lattice joint whose
// row/column maxima match the marginals; stops when the callback returns true.
template <class OnCandidate>
void enumerate_candidates(const MarginalSpec& a, const MarginalSpec& b, double resolution,
                          OnCandidate on_candidate) {
  if (a.size() != 2 || b.size() != 2)
    throw DimensionMismatchError("the joint search expects 2x2 marginal specs");
  if (!(resolution > 0.0)) throw Error("resolution must be positive");
  const long steps = std::lround(1.0 / resolution);
  if (steps < 1 || std::abs(static_cast<double>(steps) * resolution - 1.0) > kAxiomSlack)
    throw Error("resolution must divide 1 evenly");

  std::vector<double> lattice(static_cast<std::size_t>(steps) + 1);
  for (std::size_t k = 0; k < lattice.size(); ++k) lattice[k] = static_cast<double>(k) * resolution;
  lattice.back() = 1.0;

  auto matches = [](double x, double y) { return std::abs(x - y) <= kAxiomSlack; };
  const double a0 = a.values[0], a1 = a.values[1];
  const double b0 = b.values[0], b1 = b.values[1];

  for (const double c00 : lattice) {
    if (c00 > std::min(a0, b0) + kAxiomSlack) break;
    for (const double c01 : lattice) {
      if (c01 > std::min(a0, b1) + kAxiomSlack) break;
      if (!matches(std::max(c00, c01), a0)) continue;
      for (const double c10 : lattice) {
        if (c10 > std::min(a1, b0) + kAxiomSlack) break;
        if (!matches(std::max(c00, c10), b0)) continue;
        for (const double c11 : lattice) {
          if (c11 > std::min(a1, b1) + kAxiomSlack) break;
          if (!matches(std::max(c10, c11), a1)) continue;
          if (!matches(std::max(c01, c11), b1)) continue;
          if (on_candidate(std::vector<double>{c00, c01, c10, c11})) return;
        }
      }
    }
  }
}

}  // namespace

std::optional<JointGrid> search_independent_joint(const MarginalSpec& a, const MarginalSpec& b,
                                                  const Rule& rule, double resolution) {
  std::optional<JointGrid> found;
  enumerate_candidates(a, b, resolution, [&](std::vector<double> cells) {
    JointGrid grid(2, 2, std::move(cells));
    if (!verify_independence(grid, a, b, rule).all_pass()) return false;
    found.emplace(std::move(grid));
    return true;
  });
  return found;
}

std::vector<JointGrid> all_independent_joints(const MarginalSpec& a, const MarginalSpec& b,
                                              const Rule& rule, double resolution) {
  std::vector<JointGrid> found;
  enumerate_candidates(a, b, resolution, [&](std::vector<double> cells) {
    JointGrid grid(2, 2, std::move(cells));
    if (verify_independence(grid, a, b, rule).all_pass()) found.push_back(std::move(grid));
    return false;
  });
  return found;
}

}  // namespace poscop
