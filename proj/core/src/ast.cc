#include "nag/ast.h"

#include <cctype>
#include <charconv>
#include <sstream>

namespace nag {

namespace {

struct Token {
  enum Kind { kOpen, kClose, kAtom, kEnd } kind;
  std::string text;
  size_t offset;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip();
    if (pos_ >= s_.size()) return {Token::kEnd, "", pos_};
    size_t start = pos_;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::kOpen, "(", start};
    }
    if (c == ')') {
      ++pos_;
      return {Token::kClose, ")", start};
    }
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ';') {
      ++pos_;
    }
    return {Token::kAtom, s_.substr(start, pos_ - start), start};
  }

  Token peek() {
    size_t save = pos_;
    Token t = next();
    pos_ = save;
    return t;
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  size_t pos_ = 0;
};

class Parser {
 public:
  Parser(const std::string& text, const GrammarSpec& g) : lex_(text), g_(g) {}

  AstNode parse_root() {
    AstNode n = parse_node();
    Token t = lex_.next();
    if (t.kind != Token::kEnd) throw ParseError(t.offset, "trailing input '" + t.text + "'");
    return n;
  }

 private:
  Token expect_atom(const char* what) {
    Token t = lex_.next();
    if (t.kind != Token::kAtom) {
      throw ParseError(t.offset, std::string("expected ") + what + ", found " +
                                     (t.kind == Token::kEnd ? "end of input" : "'" + t.text + "'"));
    }
    return t;
  }

  void expect_close() {
    Token t = lex_.next();
    if (t.kind != Token::kClose) {
      throw ParseError(t.offset, "expected ')', found " +
                                     (t.kind == Token::kEnd ? std::string("end of input")
                                                            : "'" + t.text + "'"));
    }
  }

  AstNode parse_node() {
    Token open = lex_.next();
    if (open.kind != Token::kOpen) {
      throw ParseError(open.offset, open.kind == Token::kEnd ? "unexpected end of input"
                                                             : "malformed token '" + open.text + "'");
    }
    Token head = expect_atom("symbol");
    AstNode n;
    auto hash = head.text.find('#');
    if (hash == std::string::npos) {
      auto sym = g_.find_symbol(head.text);
      if (!sym) throw ParseError(head.offset, "unknown symbol '" + head.text + "'");
      const Symbol& s = g_.symbol(*sym);
      if (!s.is_leaf()) throw ParseError(head.offset, "nonterminal " + s.name + " needs a ruleId");
      n.symbol = *sym;
      parse_leaf(n, s, head);
      expect_close();
      return n;
    }
    std::string sym_name = head.text.substr(0, hash);
    std::string rule_id = head.text.substr(hash + 1);
    auto sym = g_.find_symbol(sym_name);
    if (!sym) throw ParseError(head.offset, "unknown symbol '" + sym_name + "'");
    auto rule = g_.find_rule(rule_id);
    if (!rule) throw ParseError(head.offset, "unknown ruleId '" + rule_id + "'");
    const Production& p = g_.production(*rule);
    if (p.lhs != *sym) {
      throw ParseError(head.offset, "ruleId " + rule_id + " does not expand " + sym_name);
    }
    n.symbol = *sym;
    n.rule = *rule;
    while (lex_.peek().kind == Token::kOpen) {
      size_t off = lex_.peek().offset;
      AstNode c = parse_node();
      if (n.children.size() >= p.rhs.size()) {
        throw ParseError(off, "arity mismatch: " + rule_id + " takes " +
                                  std::to_string(p.rhs.size()) + " children");
      }
      SymbolId want = p.rhs[n.children.size()];
      if (c.symbol != want) {
        throw ParseError(off, "arity mismatch: " + rule_id + " child " +
                                  std::to_string(n.children.size()) + " must be " +
                                  g_.symbol(want).name + ", found " + g_.symbol(c.symbol).name);
      }
      n.children.push_back(std::move(c));
    }
    Token close = lex_.peek();
    if (n.children.size() != p.rhs.size()) {
      throw ParseError(close.offset, "arity mismatch: " + rule_id + " takes " +
                                         std::to_string(p.rhs.size()) + " children, found " +
                                         std::to_string(n.children.size()));
    }
    expect_close();
    return n;
  }

  void parse_leaf(AstNode& n, const Symbol& s, const Token& head) {
    switch (s.leaf) {
      case LeafKind::kType: {
        Token t = expect_atom("type name");
        n.leaf = TypeName(t.text);
        break;
      }
      case LeafKind::kApi: {
        Token t = expect_atom("api name");
        if (!g_.registry().find(t.text) || is_constructor_key(t.text)) {
          throw ParseError(t.offset, "unknown api '" + t.text + "'");
        }
        n.leaf = ApiRef{t.text};
        break;
      }
      case LeafKind::kVar: {
        Token k = expect_atom("variable kind");
        auto kind = parse_var_kind(k.text);
        if (!kind) throw ParseError(k.offset, "malformed token '" + k.text + "': bad variable kind");
        Token i = expect_atom("variable index");
        int idx = -1;
        auto [ptr, ec] = std::from_chars(i.text.data(), i.text.data() + i.text.size(), idx);
        if (ec != std::errc() || ptr != i.text.data() + i.text.size()) {
          throw ParseError(i.offset, "malformed token '" + i.text + "': bad variable index");
        }
        VarId v{*kind, idx};
        if (!g_.namespaces().contains(v)) throw ParseError(i.offset, "index out of range");
        n.leaf = v;
        break;
      }
      case LeafKind::kNone: throw ParseError(head.offset, "not a leaf symbol");
    }
  }

  Lexer lex_;
  const GrammarSpec& g_;
};

void serialize_into(const AstNode& n, const GrammarSpec& g, std::string& out) {
  const Symbol& s = g.symbol(n.symbol);
  out += '(';
  out += s.name;
  if (s.is_leaf()) {
    out += ' ';
    out += leaf_key(n.leaf);
  } else {
    out += '#';
    out += g.production(n.rule).rule_id;
    for (const auto& c : n.children) {
      out += ' ';
      serialize_into(c, g, out);
    }
  }
  out += ')';
}

void preorder_into(const AstNode& n, std::vector<const AstNode*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children) preorder_into(c, out);
}

class Printer {
 public:
  Printer(const GrammarSpec& g, const PrettyOptions& o) : g_(g), o_(o) {}

  void stmt(const AstNode& n, int depth, std::vector<std::string>& out) const {
    const std::string sym = g_.symbol(n.symbol).name;
    const std::string rule = n.rule >= 0 ? g_.production(n.rule).rule_id : "";
    const std::string pad(static_cast<size_t>(depth * o_.indent), ' ');
    if (sym == "Start" || rule == "a2a" || rule == "a3" || rule == "a4" || rule == "a5" ||
        rule == "a6" || rule == "c1.a" || rule == "c1.b" || rule == "c1.c") {
      for (const auto& c : n.children) stmt(c, depth, out);
      return;
    }
    if (rule == "a2b") return;
    if (rule == "b1") {
      out.push_back(pad + type_name(n.children[0]) + " " + var(n.children[1]) + ";");
    } else if (rule == "b2") {
      out.push_back(pad + type_name(n.children[0]) + " " + var(n.children[1]) + " = new " +
                    type_name(n.children[2]) + "(" + args(n.children[3]) + ");");
    } else if (rule == "b3") {
      std::string e = invoke_expr(n);
      const AstNode& target = n.children[3];
      if (is_literal(target)) {
        out.push_back(pad + e + ";");
      } else {
        out.push_back(pad + var(target) + " = " + e + ";");
      }
    } else if (rule == "b7") {
      const AstNode& v = n.children[0];
      out.push_back(pad + (is_literal(v) ? std::string("return;") : "return " + var(v) + ";"));
    } else if (rule == "c2") {
      out.push_back(pad + "if (" + call(n.children[0].children[0], nullptr) + ") {");
      stmt(n.children[1], depth + 1, out);
      out.push_back(pad + "} else {");
      stmt(n.children[2], depth + 1, out);
      out.push_back(pad + "}");
    } else if (rule == "c3") {
      out.push_back(pad + "while (" + call(n.children[0].children[0], nullptr) + ") {");
      stmt(n.children[1], depth + 1, out);
      out.push_back(pad + "}");
    } else if (rule == "c4") {
      out.push_back(pad + "try {");
      stmt(n.children[0], depth + 1, out);
      const AstNode* c = &n.children[1];
      while (g_.production(c->rule).rule_id == "c5a") {
        out.push_back(pad + "} catch (" + type_name(c->children[0]) + " " + var(c->children[1]) +
                      ") {");
        stmt(c->children[2], depth + 1, out);
        c = &c->children[3];
      }
      out.push_back(pad + "}");
    } else {
      out.push_back(pad + expr(n));
    }
  }

  std::string expr(const AstNode& n) const {
    const std::string rule = n.rule >= 0 ? g_.production(n.rule).rule_id : "";
    if (rule == "b3") return invoke_expr(n);
    if (rule == "b5") return call(n, nullptr);
    if (rule == "c6") return call(n.children[0], nullptr);
    if (rule == "b6a" || rule == "b6b") return args(n);
    if (g_.symbol(n.symbol).is_leaf()) {
      if (std::holds_alternative<VarId>(n.leaf)) return var(n);
      return leaf_key(n.leaf);
    }
    return serialize_ast(n, g_);
  }

 private:
  static bool is_literal(const AstNode& v) {
    const auto* id = std::get_if<VarId>(&v.leaf);
    return id && id->is_literal();
  }

  std::string type_name(const AstNode& t) const { return leaf_key(t.leaf); }

  std::string var(const AstNode& v) const {
    const VarId& id = std::get<VarId>(v.leaf);
    if (id.is_literal()) return o_.literal_text;
    auto it = o_.var_names.find(id);
    return it != o_.var_names.end() ? it->second : default_var_name(id);
  }

  std::string args(const AstNode& a) const {
    std::string s;
    const AstNode* cur = &a;
    while (!cur->children.empty()) {
      if (!s.empty()) s += ", ";
      s += var(cur->children[0]);
      cur = &cur->children[1];
    }
    return s;
  }

  // receiver == nullptr renders a call without a receiver.
  std::string call(const AstNode& c, const std::string* receiver) const {
    const std::string& name = std::get<ApiRef>(c.children[0].leaf).name;
    std::string shown;
    if (receiver) {
      auto dot = name.rfind('.');
      shown = *receiver + "." + (dot == std::string::npos ? name : name.substr(dot + 1));
    } else {
      auto it = o_.api_display.find(name);
      shown = it != o_.api_display.end() ? it->second : name;
    }
    return shown + "(" + args(c.children[1]) + ")";
  }

  std::string invoke_expr(const AstNode& n) const {
    const AstNode& recv = n.children[2];
    std::string r;
    std::string e;
    if (is_literal(recv)) {
      e = call(n.children[0], nullptr);
    } else {
      r = var(recv);
      e = call(n.children[0], &r);
    }
    const AstNode* more = &n.children[1];
    while (!more->children.empty()) {
      std::string prefix = e;
      e = call(more->children[0], &prefix);
      more = &more->children[1];
    }
    return e;
  }

  const GrammarSpec& g_;
  const PrettyOptions& o_;
};

}  // namespace

size_t node_count(const AstNode& n) {
  size_t c = 1;
  for (const auto& ch : n.children) c += node_count(ch);
  return c;
}

std::vector<const AstNode*> preorder(const AstNode& root) {
  std::vector<const AstNode*> out;
  preorder_into(root, out);
  return out;
}

AstNode parse_ast(const std::string& text, const GrammarSpec& g) {
  return Parser(text, g).parse_root();
}

std::string serialize_ast(const AstNode& n, const GrammarSpec& g) {
  std::string out;
  serialize_into(n, g, out);
  return out;
}

void validate_ast(const AstNode& n, const GrammarSpec& g) {
  if (n.symbol < 0 || n.symbol >= static_cast<int>(g.num_symbols())) {
    throw DataError("node with unknown symbol");
  }
  const Symbol& s = g.symbol(n.symbol);
  if (s.is_leaf()) {
    if (!n.children.empty()) throw DataError(s.name + " leaf has children");
    bool ok = false;
    switch (s.leaf) {
      case LeafKind::kType: ok = std::holds_alternative<TypeName>(n.leaf); break;
      case LeafKind::kVar:
        ok = std::holds_alternative<VarId>(n.leaf) &&
             g.namespaces().contains(std::get<VarId>(n.leaf));
        break;
      case LeafKind::kApi:
        ok = std::holds_alternative<ApiRef>(n.leaf) &&
             g.registry().find(std::get<ApiRef>(n.leaf).name) != nullptr;
        break;
      case LeafKind::kNone: break;
    }
    if (!ok) throw DataError(s.name + " leaf has a bad payload");
    return;
  }
  if (n.rule < 0 || n.rule >= static_cast<int>(g.num_productions())) {
    throw DataError(s.name + " node without a production");
  }
  const Production& p = g.production(n.rule);
  if (p.lhs != n.symbol) throw DataError(p.rule_id + " does not expand " + s.name);
  if (p.rhs.size() != n.children.size()) throw DataError("arity mismatch at " + p.rule_id);
  for (size_t i = 0; i < p.rhs.size(); ++i) {
    if (n.children[i].symbol != p.rhs[i]) throw DataError("child symbol mismatch at " + p.rule_id);
    validate_ast(n.children[i], g);
  }
}

std::string default_var_name(const VarId& v) {
  switch (v.kind) {
    case VarKind::kFormal: return "param_" + std::to_string(v.index);
    case VarKind::kField: return "field_" + std::to_string(v.index);
    case VarKind::kLocal: return "var_" + std::to_string(v.index);
    case VarKind::kLiteral: return "ARG";
  }
  return "?";
}

std::string pretty_print(const AstNode& n, const GrammarSpec& g, const PrettyOptions& opts) {
  Printer p(g, opts);
  const std::string& name = g.symbol(n.symbol).name;
  static const char* kStmtSyms[] = {"Start", "Stmt",   "Decl",  "ObjInit", "Invoke",
                                    "Return", "Branch", "Loop", "Except"};
  bool statement = false;
  for (const char* s : kStmtSyms) statement = statement || name == s;
  if (!statement) return p.expr(n);
  std::vector<std::string> lines;
  p.stmt(n, 0, lines);
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace nag
