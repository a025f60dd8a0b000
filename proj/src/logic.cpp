#include "poscop/logic.hpp"

#include <cctype>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

namespace poscop {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool valid_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  for (char c : s.substr(1))
    if (!is_ident_char(c)) return false;
  return true;
}

}  // namespace

Frame::Frame(std::vector<std::string> primitives) {
  if (primitives.empty()) throw Error("frame needs at least one primitive");
  std::set<std::string_view> seen;
  for (const std::string& p : primitives) {
    if (!valid_identifier(p)) throw Error("invalid primitive name '" + p + "'");
    if (p == "true" || p == "false")
      throw Error("primitive name '" + p + "' collides with a constant");
    if (!seen.insert(p).second) throw Error("duplicate primitive '" + p + "'");
  }
  prims_ = std::make_shared<const std::vector<std::string>>(std::move(primitives));
}

std::optional<std::uint32_t> Frame::index_of(std::string_view name) const {
  for (std::uint32_t i = 0; i < size(); ++i)
    if ((*prims_)[i] == name) return i;
  return std::nullopt;
}

std::uint32_t Frame::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw UnknownPrimitiveError("unknown primitive '" + std::string(name) + "'", 0,
                              std::string(name));
}

std::uint32_t Frame::world_count() const {
  if (size() > kMaxEnumerablePrimitives)
    throw CapacityError("frame has " + std::to_string(size()) +
                        " primitives; world enumeration is capped at " +
                        std::to_string(kMaxEnumerablePrimitives));
  return 1u << size();
}

std::string Frame::world_label(WorldIndex world) const {
  std::string out;
  for (std::uint32_t i = 0; i < size(); ++i) {
    if (i) out += ' ';
    out += literal_of(world, i) ? 'T' : 'F';
  }
  return out;
}

Event Event::none(Frame frame) {
  const std::uint32_t n = frame.world_count();
  return Event(std::move(frame), detail::Bitset(n, false));
}

Event Event::all(Frame frame) {
  const std::uint32_t n = frame.world_count();
  return Event(std::move(frame), detail::Bitset(n, true));
}

Event Event::of(Frame frame, std::span<const WorldIndex> worlds) {
  const std::uint32_t n = frame.world_count();
  detail::Bitset bits(n, false);
  for (WorldIndex w : worlds) {
    if (w >= n) throw Error("world index " + std::to_string(w) + " out of range");
    bits.set(w);
  }
  return Event(std::move(frame), std::move(bits));
}

Event Event::of(Frame frame, std::initializer_list<WorldIndex> worlds) {
  return of(std::move(frame), std::span<const WorldIndex>(worlds.begin(), worlds.size()));
}

Event Event::single(Frame frame, WorldIndex world) {
  const WorldIndex w[] = {world};
  return of(std::move(frame), std::span<const WorldIndex>(w, 1));
}

Event Event::from_mask(Frame frame, std::uint64_t mask) {
  const std::uint32_t n = frame.world_count();
  detail::Bitset bits(n, false);
  for (std::uint32_t w = 0; w < n && w < 64; ++w)
    if ((mask >> w) & 1ull) bits.set(w);
  if (n < 64 && (mask >> n)) throw Error("event mask wider than the world count");
  return Event(std::move(frame), std::move(bits));
}

Event Event::from_hex(Frame frame, std::string_view hex) {
  const std::uint32_t n = frame.world_count();
  return Event(std::move(frame), detail::Bitset::from_hex(n, hex));
}

std::vector<WorldIndex> Event::worlds() const {
  std::vector<WorldIndex> out;
  out.reserve(count());
  bits_.for_each_set([&](std::uint32_t w) { out.push_back(w); });
  return out;
}

namespace {
void require_same_frame(const Frame& a, const Frame& b, const char* op) {
  if (!(a == b)) throw FrameMismatchError(std::string(op) + " across different frames");
}
}  // namespace

Event intersect(const Event& a, const Event& b) {
  require_same_frame(a.frame_, b.frame_, "event intersection");
  return Event(a.frame_, a.bits_ & b.bits_);
}

Event unite(const Event& a, const Event& b) {
  require_same_frame(a.frame_, b.frame_, "event union");
  return Event(a.frame_, a.bits_ | b.bits_);
}

Formula Formula::constant(Frame frame, bool value) {
  auto node = std::make_shared<Node>();
  node->kind = value ? FormulaKind::True : FormulaKind::False;
  return Formula(std::move(frame), std::move(node));
}

Formula Formula::primitive(Frame frame, std::uint32_t index) {
  if (index >= frame.size()) throw Error("primitive index out of range");
  auto node = std::make_shared<Node>();
  node->kind = FormulaKind::Primitive;
  node->primitive = index;
  return Formula(std::move(frame), std::move(node));
}

Formula Formula::primitive(Frame frame, std::string_view name) {
  const std::uint32_t index = frame.require(name);
  return primitive(std::move(frame), index);
}

Formula Formula::negation(Formula f) {
  auto node = std::make_shared<Node>();
  node->kind = FormulaKind::Not;
  node->left = std::move(f.root_);
  return Formula(std::move(f.frame_), std::move(node));
}

namespace {
Formula::NodePtr binary(FormulaKind kind, Formula::NodePtr a, Formula::NodePtr b) {
  auto node = std::make_shared<Formula::Node>();
  node->kind = kind;
  node->left = std::move(a);
  node->right = std::move(b);
  return node;
}
}  // namespace

Formula Formula::conjunction(Formula a, Formula b) {
  require_same_frame(a.frame_, b.frame_, "conjunction");
  return Formula(std::move(a.frame_), binary(FormulaKind::And, std::move(a.root_), std::move(b.root_)));
}

Formula Formula::disjunction(Formula a, Formula b) {
  require_same_frame(a.frame_, b.frame_, "disjunction");
  return Formula(std::move(a.frame_), binary(FormulaKind::Or, std::move(a.root_), std::move(b.root_)));
}

Formula Formula::implication(Formula a, Formula b) {
  require_same_frame(a.frame_, b.frame_, "implication");
  return Formula(std::move(a.frame_), binary(FormulaKind::Implies, std::move(a.root_), std::move(b.root_)));
}

namespace {

bool node_equal(const Formula::Node* a, const Formula::Node* b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind == FormulaKind::Primitive) return a->primitive == b->primitive;
  return node_equal(a->left.get(), b->left.get()) && node_equal(a->right.get(), b->right.get());
}

}  // namespace

bool operator==(const Formula& a, const Formula& b) {
  return a.frame_ == b.frame_ && node_equal(a.root_.get(), b.root_.get());
}

namespace {

// --- parser -----------------------------------------------------------

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  const Frame& frame;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_arrow() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      pos += 2;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) { throw ParseError(message, pos); }

  Formula::NodePtr parse_impl() {
    Formula::NodePtr left = parse_or();
    if (eat_arrow()) return binary(FormulaKind::Implies, std::move(left), parse_impl());
    return left;
  }

  Formula::NodePtr parse_or() {
    Formula::NodePtr node = parse_and();
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == '|') {
        ++pos;
        node = binary(FormulaKind::Or, std::move(node), parse_and());
      } else {
        return node;
      }
    }
  }

  Formula::NodePtr parse_and() {
    Formula::NodePtr node = parse_not();
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == '&') {
        ++pos;
        node = binary(FormulaKind::And, std::move(node), parse_not());
      } else {
        return node;
      }
    }
  }

  Formula::NodePtr parse_not() {
    if (eat('!')) {
      auto node = std::make_shared<Formula::Node>();
      node->kind = FormulaKind::Not;
      node->left = parse_not();
      return node;
    }
    return parse_atom();
  }

  Formula::NodePtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of formula");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      Formula::NodePtr inner = parse_impl();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (is_ident_start(c)) {
      const std::size_t start = pos;
      while (pos < text.size() && is_ident_char(text[pos])) ++pos;
      const std::string_view name = text.substr(start, pos - start);
      auto node = std::make_shared<Formula::Node>();
      if (name == "true") {
        node->kind = FormulaKind::True;
      } else if (name == "false") {
        node->kind = FormulaKind::False;
      } else if (auto index = frame.index_of(name)) {
        node->kind = FormulaKind::Primitive;
        node->primitive = *index;
      } else {
        throw UnknownPrimitiveError("unknown primitive '" + std::string(name) + "'", start,
                                    std::string(name));
      }
      return node;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Formula parse_formula(std::string_view text, const Frame& frame) {
  Parser parser{text, 0, frame};
  Formula::NodePtr root = parser.parse_impl();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input after formula");
  return Formula(frame, std::move(root));
}

namespace {

// Precedence for printing: -> is 1, | is 2, & is 3, ! is 4, atoms 5.
int precedence(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Implies:
      return 1;
    case FormulaKind::Or:
      return 2;
    case FormulaKind::And:
      return 3;
    case FormulaKind::Not:
      return 4;
    default:
      return 5;
  }
}

void print_node(const Formula::Node* node, const Frame& frame, int min_prec, std::string& out) {
  const int prec = precedence(node->kind);
  const bool wrap = prec < min_prec;
  if (wrap) out += '(';
  switch (node->kind) {
    case FormulaKind::True:
      out += "true";
      break;
    case FormulaKind::False:
      out += "false";
      break;
    case FormulaKind::Primitive:
      out += frame.name(node->primitive);
      break;
    case FormulaKind::Not:
      out += '!';
      print_node(node->left.get(), frame, 4, out);
      break;
    case FormulaKind::And:
      print_node(node->left.get(), frame, 3, out);
      out += " & ";
      print_node(node->right.get(), frame, 4, out);
      break;
    case FormulaKind::Or:
      print_node(node->left.get(), frame, 2, out);
      out += " | ";
      print_node(node->right.get(), frame, 3, out);
      break;
    case FormulaKind::Implies:
      print_node(node->left.get(), frame, 2, out);
      out += " -> ";
      print_node(node->right.get(), frame, 1, out);
      break;
  }
  if (wrap) out += ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print_node(f.root().get(), f.frame(), 0, out);
  return out;
}

namespace {

bool eval_node(const Formula::Node* node, const Frame& frame, WorldIndex world) {
  switch (node->kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Primitive:
      return frame.literal_of(world, node->primitive);
    case FormulaKind::Not:
      return !eval_node(node->left.get(), frame, world);
    case FormulaKind::And:
      return eval_node(node->left.get(), frame, world) &&
             eval_node(node->right.get(), frame, world);
    case FormulaKind::Or:
      return eval_node(node->left.get(), frame, world) ||
             eval_node(node->right.get(), frame, world);
    case FormulaKind::Implies:
      return !eval_node(node->left.get(), frame, world) ||
             eval_node(node->right.get(), frame, world);
  }
  return false;  // unreachable
}

detail::Bitset models_node(const Formula::Node* node, const Frame& frame) {
  const std::uint32_t n = frame.world_count();
  switch (node->kind) {
    case FormulaKind::True:
      return detail::Bitset(n, true);
    case FormulaKind::False:
      return detail::Bitset(n, false);
    case FormulaKind::Primitive: {
      detail::Bitset bits(n, false);
      for (WorldIndex w = 0; w < n; ++w)
        if (frame.literal_of(w, node->primitive)) bits.set(w);
      return bits;
    }
    case FormulaKind::Not:
      return ~models_node(node->left.get(), frame);
    case FormulaKind::And:
      return models_node(node->left.get(), frame) & models_node(node->right.get(), frame);
    case FormulaKind::Or:
      return models_node(node->left.get(), frame) | models_node(node->right.get(), frame);
    case FormulaKind::Implies:
      return ~models_node(node->left.get(), frame) | models_node(node->right.get(), frame);
  }
  return detail::Bitset(n, false);  // unreachable
}

}  // namespace

bool evaluate(const Formula& f, const World& w) {
  if (!(f.frame() == w.frame()))
    throw FrameMismatchError("formula and world live on different frames");
  return eval_node(f.root().get(), f.frame(), w.index());
}

Event models(const Formula& f) {
  return Event(f.frame(), models_node(f.root().get(), f.frame()));
}

}  // namespace poscop
