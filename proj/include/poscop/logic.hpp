#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/bitset.hpp"
#include "poscop/error.hpp"

namespace poscop {

using WorldIndex = std::uint32_t;

// Operations that walk every world refuse frames larger than this.
inline constexpr std::uint32_t kMaxEnumerablePrimitives = 24;

// An ordered set of propositional primitives. Declaration order is part of
// the contract: the world-index bit layout, file formats and table layouts
// all follow it. Copies are cheap (shared storage).
class Frame {
 public:
  explicit Frame(std::vector<std::string> primitives);
  Frame(std::initializer_list<std::string> primitives)
      : Frame(std::vector<std::string>(primitives)) {}

  std::uint32_t size() const { return static_cast<std::uint32_t>(prims_->size()); }
  const std::vector<std::string>& primitives() const { return *prims_; }
  const std::string& name(std::uint32_t primitive) const { return (*prims_)[primitive]; }

  std::optional<std::uint32_t> index_of(std::string_view name) const;
  // Like index_of but throws UnknownPrimitiveError.
  std::uint32_t require(std::string_view name) const;

  // Number of worlds (2^size). Throws CapacityError beyond the cap.
  std::uint32_t world_count() const;

  // World-index layout: the first primitive occupies the most significant
  // bit; bit value 0 encodes T and 1 encodes F. World 0 therefore assigns T
  // everywhere, and enumeration order lists T before F per primitive.
  bool literal_of(WorldIndex world, std::uint32_t primitive) const {
    return ((world >> (size() - 1 - primitive)) & 1u) == 0;
  }
  std::string world_label(WorldIndex world) const;

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.prims_ == b.prims_ || *a.prims_ == *b.prims_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> prims_;
};

// One total interpretation of a frame, addressed by world index.
class World {
 public:
  World(Frame frame, WorldIndex index) : frame_(std::move(frame)), index_(index) {}

  const Frame& frame() const { return frame_; }
  WorldIndex index() const { return index_; }
  bool value(std::uint32_t primitive) const { return frame_.literal_of(index_, primitive); }
  bool value(std::string_view name) const { return value(frame_.require(name)); }
  std::string label() const { return frame_.world_label(index_); }

 private:
  Frame frame_;
  WorldIndex index_;
};

// A subset of the worlds of a frame.
class Event {
 public:
  static Event none(Frame frame);
  static Event all(Frame frame);
  static Event of(Frame frame, std::span<const WorldIndex> worlds);
  static Event of(Frame frame, std::initializer_list<WorldIndex> worlds);
  static Event single(Frame frame, WorldIndex world);
  // Bit w of `mask` selects world w; handy for exhaustive event loops.
  static Event from_mask(Frame frame, std::uint64_t mask);
  static Event from_hex(Frame frame, std::string_view hex);

  const Frame& frame() const { return frame_; }
  bool contains(WorldIndex w) const { return bits_.test(w); }
  std::uint32_t count() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  std::vector<WorldIndex> worlds() const;
  template <class Fn>
  void for_each(Fn&& fn) const {
    bits_.for_each_set(fn);
  }
  std::string to_hex() const { return bits_.to_hex(); }

  Event complement() const { return Event(frame_, ~bits_); }

  friend Event intersect(const Event& a, const Event& b);
  friend Event unite(const Event& a, const Event& b);
  friend bool operator==(const Event& a, const Event& b) {
    return a.frame_ == b.frame_ && a.bits_ == b.bits_;
  }

 private:
  Event(Frame frame, detail::Bitset bits) : frame_(std::move(frame)), bits_(std::move(bits)) {}
  friend Event models(const class Formula& f);

  Frame frame_;
  detail::Bitset bits_;
};

inline Event complement(const Event& a) { return a.complement(); }

enum class FormulaKind : std::uint8_t { True, False, Primitive, Not, And, Or, Implies };

// Immutable propositional formula over a frame. Structural sharing keeps
// copies cheap; equality is structural.
class Formula {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    FormulaKind kind;
    std::uint32_t primitive = 0;  // Kind::Primitive only
    NodePtr left, right;          // Not uses left only
  };

  static Formula constant(Frame frame, bool value);
  static Formula primitive(Frame frame, std::uint32_t index);
  static Formula primitive(Frame frame, std::string_view name);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);

  const Frame& frame() const { return frame_; }
  const NodePtr& root() const { return root_; }
  FormulaKind kind() const { return root_->kind; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  Formula(Frame frame, NodePtr root) : frame_(std::move(frame)), root_(std::move(root)) {}
  friend Formula parse_formula(std::string_view text, const Frame& frame);

  Frame frame_;
  NodePtr root_;
};

// Grammar:  formula := impl
//           impl    := or ("->" impl)?          (right associative)
//           or      := and ("|" and)*
//           and     := not ("&" not)*
//           not     := "!" not | atom
//           atom    := IDENT | "true" | "false" | "(" formula ")"
// Identifiers are [A-Za-z_][A-Za-z0-9_]* and must name frame primitives.
Formula parse_formula(std::string_view text, const Frame& frame);

// Minimal-parenthesis rendering; parse(to_string(f)) reproduces f exactly.
std::string to_string(const Formula& f);

// Truth of f at a single world (independent of the set-level route below).
bool evaluate(const Formula& f, const World& w);

// The set of worlds satisfying f, computed by set algebra over the frame.
Event models(const Formula& f);

Event intersect(const Event& a, const Event& b);
Event unite(const Event& a, const Event& b);

}  // namespace poscop
