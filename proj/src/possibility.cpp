#include "poscop/possibility.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

#include "text_util.hpp"

namespace poscop {

namespace {

void validate_values(const Frame& frame, const std::vector<double>& values) {
  if (values.size() != frame.world_count())
    throw DimensionMismatchError("density needs one value per world (" +
                                 std::to_string(frame.world_count()) + " expected, " +
                                 std::to_string(values.size()) + " given)");
  double max = 0.0;
  for (double v : values) {
    if (!(v >= -kDensityTolerance && v <= 1.0 + kDensityTolerance))
      throw InvalidDensityError("density value " + std::to_string(v) + " outside [0,1]");
    max = std::max(max, v);
  }
  if (std::abs(max - 1.0) > kDensityTolerance)
    throw InvalidDensityError("density maximum is " + std::to_string(max) +
                              "; a density must attain 1");
}

}  // namespace

Density::Density(Frame frame, std::vector<double> values, bool)
    : frame_(std::move(frame)), values_(std::move(values)) {}

Density::Density(Frame frame, std::vector<double> values)
    : Density(std::move(frame), std::move(values), true) {
  validate_values(frame_, values_);
  for (double& v : values_) v = std::clamp(v, 0.0, 1.0);
}

Density Density::normalized(Frame frame, std::vector<double> values) {
  double max = 0.0;
  for (double v : values) max = std::max(max, v);
  if (!(max > 0.0)) throw InvalidDensityError("cannot normalize an all-zero table");
  for (double& v : values) v /= max;
  return Density(std::move(frame), std::move(values));
}

Density Density::unchecked(Frame frame, std::vector<double> values) {
  return Density(std::move(frame), std::move(values), false);
}

double measure(const Density& d, const Event& a) {
  if (!(d.frame() == a.frame()))
    throw FrameMismatchError("measure of an event from a different frame");
  double max = 0.0;
  a.for_each([&](WorldIndex w) { max = std::max(max, d[w]); });
  return max;
}

double necessity(const Density& d, const Event& a) { return 1.0 - measure(d, a.complement()); }

MValueFunction::MValueFunction(std::vector<Event> focal_chain, std::vector<double> masses)
    : focal_(std::move(focal_chain)), masses_(std::move(masses)) {
  if (focal_.empty() || focal_.size() != masses_.size())
    throw Error("m-value function needs a non-empty focal chain with one mass per element");
  if (focal_.front().empty()) throw Error("the empty set cannot carry mass");
  double sum = 0.0;
  for (double m : masses_) {
    if (!(m > 0.0)) throw Error("focal masses must be positive");
    sum += m;
  }
  if (std::abs(sum - 1.0) > kDensityTolerance)
    throw Error("focal masses must sum to 1 (got " + std::to_string(sum) + ")");
  for (std::size_t i = 1; i < focal_.size(); ++i) {
    if (!(focal_[i].frame() == focal_.front().frame()))
      throw FrameMismatchError("focal chain spans different frames");
    const Event& small = focal_[i - 1];
    const Event& big = focal_[i];
    if (!(intersect(small, big) == small) || small.count() >= big.count())
      throw Error("focal chain must be strictly nested");
  }
}

double MValueFunction::belief(const Event& a) const {
  if (!(a.frame() == frame()))
    throw FrameMismatchError("belief of an event from a different frame");
  // Subsets of `a` form a prefix of the chain, so accumulate until the first
  // focal element that escapes.
  double total = 0.0;
  for (std::size_t i = 0; i < focal_.size(); ++i) {
    if (!(intersect(focal_[i], a) == focal_[i])) break;
    total += masses_[i];
  }
  return total;
}

MValueFunction to_mvalue(const Density& d) {
  std::vector<std::pair<double, WorldIndex>> positive;
  for (WorldIndex w = 0; w < d.world_count(); ++w)
    if (d[w] > 0.0) positive.push_back({d[w], w});
  if (positive.empty()) throw InvalidDensityError("density is zero everywhere");
  std::sort(positive.begin(), positive.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  // Group into distinct levels (descending), each anchored at its largest
  // member; the anchor is the level value.
  std::vector<double> levels;
  std::vector<std::vector<WorldIndex>> groups;
  for (const auto& [value, world] : positive) {
    if (levels.empty() || levels.back() - value > kLevelTolerance) {
      levels.push_back(value);
      groups.emplace_back();
    }
    groups.back().push_back(world);
  }

  std::vector<Event> focal;
  std::vector<double> masses;
  std::vector<WorldIndex> accumulated;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    accumulated.insert(accumulated.end(), groups[i].begin(), groups[i].end());
    focal.push_back(Event::of(d.frame(), std::span<const WorldIndex>(accumulated)));
    const double next = i + 1 < levels.size() ? levels[i + 1] : 0.0;
    masses.push_back(levels[i] - next);
  }
  return MValueFunction(std::move(focal), std::move(masses));
}

Density from_mvalue(const MValueFunction& m) {
  const Frame& frame = m.frame();
  std::vector<double> values(frame.world_count(), 0.0);
  // Masses accumulate from the innermost focal element outward; per world the
  // partial sums telescope back to its level.
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double mass = m.masses()[i];
    m.focal_chain()[i].for_each([&](WorldIndex w) { values[w] += mass; });
  }
  return Density(frame, std::move(values));
}

Ordering compare_expectation(const Density& d, const Formula& a, const Formula& b) {
  const double na = measure(d, models(a).complement());
  const double nb = measure(d, models(b).complement());
  if (na < nb) return Ordering::Greater;
  if (na > nb) return Ordering::Less;
  return Ordering::Equal;
}

ExpectationReport check_expectation_axioms(const Density& d, std::span<const Formula> sample) {
  validate_values(d.frame(), std::vector<double>(d.values().begin(), d.values().end()));

  const std::size_t n = sample.size();
  std::vector<Event> sets;
  std::vector<double> pn;  // Π(not sample[i])
  sets.reserve(n);
  pn.reserve(n);
  for (const Formula& f : sample) {
    if (!(f.frame() == d.frame()))
      throw FrameMismatchError("sample formula from a different frame");
    sets.push_back(models(f));
    pn.push_back(measure(d, sets.back().complement()));
  }
  const auto at_least = [&](std::size_t i, std::size_t j) { return pn[i] <= pn[j]; };

  ExpectationReport report;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        ++report.e1_checked;
        if (at_least(i, j) && at_least(j, k) && !at_least(i, k))
          report.violations.push_back(
              {"E1", {i, j, k}, "transitivity broken across the triple"});
      }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(intersect(sets[i], sets[j]) == sets[i])) continue;  // i does not entail j
      ++report.e2_checked;
      if (!at_least(j, i))
        report.violations.push_back(
            {"E2", {i, j}, "an entailed formula fell below its premise"});
    }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ++report.e3_checked;
      const double pn_conj = measure(d, intersect(sets[i], sets[j]).complement());
      if (!(pn_conj <= pn[i] || pn_conj <= pn[j]))
        report.violations.push_back(
            {"E3", {i, j}, "conjunction fell below both conjuncts"});
    }

  ++report.e4_checked;
  const double top = measure(d, Event::all(d.frame()));
  if (!(0.0 < top))
    report.violations.push_back({"E4", {}, "true is not strictly above false"});
  return report;
}

// --- text format --------------------------------------------------------

namespace detail {

double parse_decimal_value(std::string_view token, std::size_t line, int max_fraction_digits) {
  const std::string what = "bad value '" + std::string(token) + "'";
  std::size_t dot = token.find('.');
  std::string_view whole = dot == std::string_view::npos ? token : token.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : token.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty()))
    throw ParseError(what, line);
  for (char c : whole)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError(what, line);
  for (char c : frac)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError(what, line);
  if (max_fraction_digits >= 0 && frac.size() > static_cast<std::size_t>(max_fraction_digits))
    throw ParseError(what + ": more than " + std::to_string(max_fraction_digits) +
                         " fraction digits",
                     line);
  const std::string buffer(token);
  const double value = std::stod(buffer);
  if (value < 0.0 || value > 1.0)
    throw ParseError("value " + buffer + " outside [0,1]", line);
  return value;
}

}  // namespace detail

// Shortest decimal form that parses back bit-exactly.
std::string format_value(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

Density parse_density(std::string_view text) {
  std::optional<Frame> frame;
  std::vector<double> values;
  std::vector<bool> listed;

  detail::for_each_content_line(text, [&](std::string_view line, std::size_t line_no) {
    if (!frame) {
      if (!line.starts_with("frame:"))
        throw ParseError("expected a 'frame:' line first", line_no);
      auto names = detail::split_ws(line.substr(6));
      std::vector<std::string> prims;
      for (auto n : names) prims.emplace_back(n);
      frame.emplace(std::move(prims));
      values.assign(frame->world_count(), 0.0);
      listed.assign(frame->world_count(), false);
      return;
    }

    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'literals : value'", line_no);
    auto literals = detail::split_ws(line.substr(0, colon));
    auto rest = detail::split_ws(line.substr(colon + 1));
    if (literals.size() != frame->size())
      throw ParseError("expected " + std::to_string(frame->size()) + " literals", line_no);
    if (rest.size() != 1) throw ParseError("expected exactly one value", line_no);

    WorldIndex world = 0;
    for (std::size_t i = 0; i < literals.size(); ++i) {
      bool truth;
      if (literals[i] == "T")
        truth = true;
      else if (literals[i] == "F")
        truth = false;
      else
        throw ParseError("bad literal '" + std::string(literals[i]) + "' (use T or F)", line_no);
      world = (world << 1) | (truth ? 0u : 1u);
    }
    if (listed[world])
      throw ParseError("duplicate world '" + frame->world_label(world) + "'", line_no);
    listed[world] = true;
    values[world] = detail::parse_decimal_value(rest[0], line_no, -1);
  });

  if (!frame) throw ParseError("empty density text", 0);
  return Density(*frame, std::move(values));
}

std::string format_density(const Density& d) {
  std::ostringstream out;
  out << "frame:";
  for (const std::string& p : d.frame().primitives()) out << ' ' << p;
  out << '\n';
  for (WorldIndex w = 0; w < d.world_count(); ++w)
    out << d.frame().world_label(w) << " : " << format_value(d[w]) << '\n';
  return out.str();
}

}  // namespace poscop
