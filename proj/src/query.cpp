#include "infocalc/query.hpp"

#include <cctype>

#include "infocalc/errors.hpp"

namespace infocalc {

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '~' || c == '.' || c == '+' || c == '\'' ||
         c == '-';
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= text_.size();
  }
  bool peek(std::string_view tok) {
    skip();
    return text_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  // A keyword followed by '(' (or '{' for sum).
  bool accept_call(std::string_view name, char open) {
    skip();
    std::size_t p = pos_;
    if (text_.substr(p, name.size()) != name) return false;
    p += name.size();
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    if (p >= text_.size() || text_[p] != open) return false;
    pos_ = p + 1;
    return true;
  }
  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && word_char(text_[pos_])) {
      if (text_[pos_] == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') break;
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::parse_error, why + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Item parse_item(Cursor& c) {
  Item i{c.word(), std::nullopt};
  if (c.accept("=")) i.value = c.word();
  return i;
}

QueryItem parse_query_item(Cursor& c) {
  QueryItem q;
  if (c.accept_call("do", '(')) {
    q.kind = QueryItem::Kind::do_;
    q.node = c.word();
    if (c.accept("=")) q.value = c.word();
    c.expect(")");
    return q;
  }
  if (c.accept_call("sigma", '(')) {
    q.node = c.word();
    if (c.accept("->")) {
      q.kind = QueryItem::Kind::sigma_edge;
      q.head = c.word();
      c.expect(":");
      q.map = c.word();
    } else {
      q.kind = QueryItem::Kind::sigma;
      if (c.accept("=")) q.value = c.word();
    }
    c.expect(")");
    return q;
  }
  q.kind = QueryItem::Kind::observe;
  q.node = c.word();
  if (c.accept("=")) q.value = c.word();
  return q;
}

std::vector<QueryItem> parse_query_items(Cursor& c) {
  std::vector<QueryItem> out{parse_query_item(c)};
  while (c.accept(",")) out.push_back(parse_query_item(c));
  return out;
}

std::string join(const std::vector<QueryItem>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : ",") + to_string(i);
  return out;
}

}  // namespace

std::string to_string(const QueryItem& item) {
  const std::string v = item.value ? "=" + *item.value : "";
  switch (item.kind) {
    case QueryItem::Kind::do_:
      return "do(" + item.node + v + ")";
    case QueryItem::Kind::sigma:
      return "sigma(" + item.node + v + ")";
    case QueryItem::Kind::sigma_edge:
      return "sigma(" + item.node + "->" + item.head + ":" + item.map + ")";
    case QueryItem::Kind::observe:
      return item.node + v;
  }
  return {};
}

Query parse_query(std::string_view text) {
  Cursor c(text);
  Query q;
  if (!c.accept_call("P", '(')) c.fail("expected 'P('");
  q.targets.push_back(parse_item(c));
  while (c.accept(",")) q.targets.push_back(parse_item(c));
  if (c.accept("^")) q.modifiers = parse_query_items(c);
  if (c.accept("|")) q.items = parse_query_items(c);
  c.expect(")");
  if (!c.done()) c.fail("trailing input");
  for (const auto& m : q.modifiers)
    if (m.kind == QueryItem::Kind::observe) c.fail("modifiers must be interventions");
  return q;
}

std::string to_string(const Query& q) {
  std::string out = "P(";
  for (std::size_t i = 0; i < q.targets.size(); ++i) out += (i ? "," : "") + to_string(q.targets[i]);
  if (!q.modifiers.empty()) out += "^" + join(q.modifiers);
  if (!q.items.empty()) out += "|" + join(q.items);
  return out + ")";
}

namespace {

ProbAtom atom_of(const Query& q) {
  ProbAtom atom;
  atom.targets = q.targets;
  bool saw_do = false, saw_sigma = false;
  for (const auto& i : q.items) {
    switch (i.kind) {
      case QueryItem::Kind::do_:
        saw_do = true;
        atom.actions.push_back({i.node, i.value});
        break;
      case QueryItem::Kind::sigma:
        saw_sigma = true;
        atom.actions.push_back({i.node, i.value});
        break;
      case QueryItem::Kind::sigma_edge:
        throw Error(ErrorCode::parse_error, "edge information functions are not allowed here");
      case QueryItem::Kind::observe:
        atom.given.push_back({i.node, i.value});
        break;
    }
  }
  if (saw_do && saw_sigma) throw Error(ErrorCode::parse_error, "do and sigma cannot be mixed in one query");
  atom.action_kind = saw_do ? ActionKind::do_ : ActionKind::info;
  atom.normalize();
  return atom;
}

}  // namespace

ProbAtom to_atom(const Query& q) {
  if (!q.modifiers.empty()) throw Error(ErrorCode::parse_error, "counterfactual modifiers are not allowed here");
  ProbAtom atom = atom_of(q);
  if (!atom.disjoint()) throw Error(ErrorCode::overlapping_sets, "targets, interventions and evidence must be disjoint");
  return atom;
}

namespace {

Expression parse_product(Cursor& c);

Expression parse_term(Cursor& c) {
  if (c.accept_call("sum", '{')) {
    std::vector<std::string> vars{c.word()};
    while (c.accept(",")) vars.push_back(c.word());
    c.expect("}");
    c.expect("(");
    Expression body = parse_product(c);
    c.expect(")");
    return Expression::sum(std::move(vars), std::move(body));
  }
  if (!c.accept_call("P", '(')) c.fail("expected 'P(' or 'sum{'");
  Query q;
  q.targets.push_back(parse_item(c));
  while (c.accept(",")) q.targets.push_back(parse_item(c));
  if (c.accept("|")) q.items = parse_query_items(c);
  c.expect(")");
  return Expression::of(atom_of(q));
}

Expression parse_product(Cursor& c) {
  std::vector<Expression> factors{parse_term(c)};
  while (c.accept("*")) factors.push_back(parse_term(c));
  return Expression::product(std::move(factors));
}

}  // namespace

Expression parse_expression(std::string_view text) {
  Cursor c(text);
  Expression e = parse_product(c);
  if (!c.done()) c.fail("trailing input");
  return e;
}

}  // namespace infocalc
