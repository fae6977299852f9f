#include <cctype>
#include <map>

#include "pbo/syntax.hpp"

namespace pbo {
namespace {

enum class Tk {
  End, Ident, Upper, Int, Lft, MultVar, TyVar, Sym, Kw
};

struct Token {
  Tk kind = Tk::End;
  std::string text;
  int64_t num = 0;
  int line = 1, col = 1;
};

const char* const kKeywords[] = {"let", "let1", "in", "and", "case", "of", "seq",
                                 "forall", "data", "static", "id"};

bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_' || c == '\'' || c == '$'; }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t k) {
    for (size_t j = 0; j < k && i < s.size(); ++j, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c)) {
      adv(1);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
      t.kind = Tk::Int;
      t.text = s.substr(i, j - i);
      try {
        t.num = std::stoll(t.text);
      } catch (...) {
        throw ParseError("Syntax", "integer literal out of range", line, col);
      }
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_' || c == '$') {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.text = s.substr(i, j - i);
      t.kind = std::isupper((unsigned char)c) ? Tk::Upper : Tk::Ident;
      for (auto* k : kKeywords)
        if (t.text == k) t.kind = Tk::Kw;
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if ((c == '\'' || c == '%' || c == '#') && i + 1 < s.size() &&
        (std::isalpha((unsigned char)s[i + 1]) || s[i + 1] == '_')) {
      size_t j = i + 1;
      while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
      t.text = s.substr(i, j - i);
      t.kind = c == '\'' ? Tk::Lft : c == '%' ? Tk::MultVar : Tk::TyVar;
      adv(j - i);
      out.push_back(t);
      continue;
    }
    static const char* const syms[] = {">>=", "-o", "->", "<=", ">=", "==", "/=", "@[", "()",
                                       "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "\\",
                                       "=", "|", "&", "+", "-", "*", "<", ">"};
    bool hit = false;
    for (auto* sym : syms) {
      size_t n = std::char_traits<char>::length(sym);
      if (s.compare(i, n, sym) == 0) {
        // `-o` only as a standalone token (not `-ox`)
        if (std::string_view(sym) == "-o" && i + 2 < s.size() && ident_char(s[i + 2])) continue;
        t.kind = Tk::Sym;
        t.text = sym;
        adv(n);
        out.push_back(t);
        hit = true;
        break;
      }
    }
    if (!hit) throw ParseError("UnknownOperator", std::string("unknown symbol '") + c + "'", line, col);
  }
  Token e;
  e.line = line;
  e.col = col;
  out.push_back(e);
  return out;
}

struct CtorInfo {
  Sym type = 0;
  int arity = 0;
};

class Parser {
 public:
  Parser(const std::string& text, std::vector<DataDecl> decls) : toks_(lex(text)), decls_(std::move(decls)) {
    for (auto& d : decls_) register_decl(d, 0, 0);
  }

  Program program() {
    while (is_kw("data")) decls_.push_back(data_decl());
    Program p;
    TermP body = term();
    if (peek().kind != Tk::End) fail("Syntax", "unexpected '" + peek().text + "' after program body");
    p.data_decls = decls_;
    p.body = body;
    return p;
  }

  TypeP whole_type() {
    TypeP t = type();
    if (peek().kind != Tk::End) fail("Syntax", "trailing input after type");
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<DataDecl> decls_;
  std::map<Sym, CtorInfo> ctors_;
  std::map<Sym, int> types_;  // type constructor -> parameter count
  int gensym_ = 0;

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_sym(const char* s, size_t k = 0) const {
    return peek(k).kind == Tk::Sym && peek(k).text == s;
  }
  bool is_kw(const char* s) const { return peek().kind == Tk::Kw && peek().text == s; }
  [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
    throw ParseError(code, msg, peek().line, peek().col);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& code, const std::string& msg) const {
    throw ParseError(code, msg, t.line, t.col);
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail("Syntax", std::string("expected '") + s + "' but found '" + peek().text + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail("Syntax", std::string("expected '") + s + "' but found '" + peek().text + "'");
    next();
  }
  Sym ident() {
    if (peek().kind != Tk::Ident) fail("Syntax", "expected identifier but found '" + peek().text + "'");
    return intern(next().text);
  }

  void register_decl(const DataDecl& d, int line, int col) {
    if (types_.count(d.name)) throw ParseError("DuplicateConstructor", "duplicate type '" + name_of(d.name) + "'", line, col);
    types_[d.name] = int(d.params.size());
    for (auto& c : d.ctors) {
      if (ctors_.count(c.name))
        throw ParseError("DuplicateConstructor", "duplicate constructor '" + name_of(c.name) + "'", line, col);
      ctors_[c.name] = {d.name, int(c.fields.size())};
    }
  }

  // ---- data declarations ----

  DataDecl data_decl() {
    Token kw = next();  // data
    DataDecl d;
    if (peek().kind != Tk::Upper) fail("Syntax", "expected type name after 'data'");
    d.name = intern(next().text);
    while (peek().kind == Tk::TyVar) d.params.push_back(intern(next().text));
    // register the type name first so fields may recurse
    if (types_.count(d.name)) fail_at(kw, "DuplicateConstructor", "duplicate type '" + name_of(d.name) + "'");
    types_[d.name] = int(d.params.size());
    expect_sym("=");
    for (;;) {
      CtorDecl c;
      if (peek().kind != Tk::Upper) fail("Syntax", "expected constructor name");
      Token ct = next();
      c.name = intern(ct.text);
      while (peek().kind == Tk::Int || peek().kind == Tk::MultVar ||
             (peek().kind == Tk::Ident && peek().text == "w")) {
        Mult m = mult();
        expect_sym(":");
        c.fields.emplace_back(m, atype());
      }
      if (ctors_.count(c.name)) fail_at(ct, "DuplicateConstructor", "duplicate constructor '" + ct.text + "'");
      ctors_[c.name] = {d.name, int(c.fields.size())};
      d.ctors.push_back(std::move(c));
      if (is_sym("|")) {
        next();
        continue;
      }
      break;
    }
    expect_sym(";");
    return d;
  }

  // ---- types ----

  Mult mult_atom() {
    const Token& t = peek();
    if (t.kind == Tk::Int && t.num == 1) {
      next();
      return Mult::one();
    }
    if (t.kind == Tk::Ident && t.text == "w") {
      next();
      return Mult::many();
    }
    if (t.kind == Tk::MultVar) {
      next();
      return Mult::var(intern(t.text));
    }
    fail("Syntax", "expected multiplicity (1, w or %var)");
  }

  Mult mult() {
    Mult m = mult_atom();
    while (is_sym("*")) {
      next();
      m = mult_mul(m, mult_atom());
    }
    return m;
  }

  Lifetime lifetime() {
    if (peek().kind == Tk::Lft) return Lifetime::var(intern(next().text));
    if (is_kw("static")) {
      next();
      return Lifetime::stat();
    }
    if (is_sym("(")) {
      next();
      Lifetime l = lifetime();
      while (is_sym("&")) {
        next();
        l = lft_meet(l, lifetime());
      }
      expect_sym(")");
      return l;
    }
    fail("Syntax", "expected lifetime");
  }

  bool binder(BinderKind& k, Sym& name) {
    if (is_kw("id")) {
      next();
      if (peek().kind != Tk::Lft) fail("Syntax", "expected lifetime name after 'id'");
      k = BinderKind::LifetimeId;
      name = intern(next().text);
      return true;
    }
    switch (peek().kind) {
      case Tk::Lft: k = BinderKind::Lifetime; break;
      case Tk::MultVar: k = BinderKind::Mult; break;
      case Tk::TyVar: k = BinderKind::Type; break;
      default: return false;
    }
    name = intern(next().text);
    return true;
  }

  TypeP type() {
    if (is_kw("forall")) {
      next();
      BinderKind k;
      Sym n;
      if (!binder(k, n)) fail("Syntax", "expected binder after 'forall'");
      expect_sym(".");
      return ty::forall(k, n, type());
    }
    TypeP a = btype();
    if (is_sym("-o")) {
      next();
      return ty::fun(a, Mult::one(), type());
    }
    if (is_sym("->")) {
      next();
      return ty::fun(a, Mult::many(), type());
    }
    if (is_sym("-") && is_sym("{", 1)) {
      next();
      next();
      Mult m = mult();
      expect_sym("}");
      expect_sym(">");
      return ty::fun(a, m, type());
    }
    return a;
  }

  TypeP btype() {
    const Token& t = peek();
    if (t.kind == Tk::Upper) {
      const std::string& s = t.text;
      if (s == "Ref") { next(); return ty::ref(atype()); }
      if (s == "Now") { next(); return ty::now(lifetime()); }
      if (s == "End") { next(); return ty::end(lifetime()); }
      if (s == "Mut" || s == "Share") {
        next();
        Lifetime l = lifetime();
        return ty::bor(s == "Mut" ? Bcon::Mut : Bcon::Share, l, atype());
      }
      if (s == "Lend") { next(); Lifetime l = lifetime(); return ty::lend(l, atype()); }
      if (s == "BO") { next(); Lifetime l = lifetime(); return ty::bo(l, atype()); }
      if (s != "Int" && s != "Linearly") {
        Token tt = next();
        Sym c = intern(tt.text);
        auto it = types_.find(c);
        if (it == types_.end()) fail_at(tt, "UnknownIdentifier", "unknown type '" + tt.text + "'");
        std::vector<TypeP> args;
        for (int i = 0; i < it->second; ++i) args.push_back(atype());
        return ty::data(c, std::move(args));
      }
    }
    return atype();
  }

  TypeP atype() {
    Token t = peek();
    if (t.kind == Tk::Upper) {
      if (t.text == "Int") { next(); return ty::int_(); }
      if (t.text == "Linearly") { next(); return ty::linearly(); }
      Sym c = intern(t.text);
      auto it = types_.find(c);
      if (it != types_.end() && it->second == 0) {
        next();
        return ty::data(c, {});
      }
      if (it == types_.end() && t.text != "Ref" && t.text != "Now" && t.text != "End" && t.text != "Mut" &&
          t.text != "Share" && t.text != "Lend" && t.text != "BO")
        fail("UnknownIdentifier", "unknown type '" + t.text + "'");
      fail("Syntax", "type '" + t.text + "' takes arguments; parenthesize it");
    }
    if (t.kind == Tk::TyVar) {
      next();
      return ty::var(intern(t.text));
    }
    if (is_sym("()")) {
      next();
      return ty::unit();
    }
    if (is_sym("(")) {
      next();
      TypeP a = type();
      if (is_sym(",")) {
        next();
        TypeP b = type();
        expect_sym(")");
        return ty::pair(a, b);
      }
      expect_sym(")");
      return a;
    }
    fail("Syntax", "expected type but found '" + t.text + "'");
  }

  std::vector<InstArg> inst_args() {
    expect_sym("@[");
    std::vector<InstArg> out;
    if (is_sym("]")) fail("Syntax", "empty instantiation");
    for (;;) {
      InstArg a;
      const Token& t = peek();
      if (t.kind == Tk::Lft || (t.kind == Tk::Kw && t.text == "static") ||
          (is_sym("(") && peek(1).kind == Tk::Lft)) {
        a.kind = InstArg::Lifetime;
        a.lft = lifetime();
      } else if (t.kind == Tk::MultVar || (t.kind == Tk::Ident && t.text == "w") ||
                 (t.kind == Tk::Int && t.num == 1)) {
        a.kind = InstArg::Mult;
        a.mult = mult();
      } else if (t.kind == Tk::Upper && (t.text == "Mut" || t.text == "Share") &&
                 (is_sym(",", 1) || is_sym("]", 1))) {
        a.kind = InstArg::Bcon;
        a.bcon = t.text == "Mut" ? Bcon::Mut : Bcon::Share;
        next();
      } else {
        a.kind = InstArg::Type;
        a.type = type();
      }
      out.push_back(std::move(a));
      if (is_sym(",")) {
        next();
        continue;
      }
      break;
    }
    expect_sym("]");
    return out;
  }

  // ---- terms ----

  TermP at(TermP t, const Token& tok) {
    if (t->line) return t;
    Term r = *t;
    r.line = tok.line;
    r.col = tok.col;
    return std::make_shared<const Term>(std::move(r));
  }

  bool starts_prefix_form() const {
    return is_kw("let") || is_kw("let1") || is_sym("\\") || is_kw("forall") || is_kw("case") ||
           is_kw("seq");
  }

  TermP term() {
    Token t = peek();
    if (is_kw("let") || is_kw("let1")) {
      bool linear = next().text == "let1";
      std::vector<LetBind> bs;
      for (;;) {
        LetBind b;
        b.name = ident();
        if (is_sym(":")) {
          next();
          b.ann = type();
        }
        expect_sym("=");
        b.rhs = term();
        bs.push_back(std::move(b));
        if (is_kw("and")) {
          next();
          continue;
        }
        break;
      }
      expect_kw("in");
      return at(tm::let(std::move(bs), term(), linear), t);
    }
    if (is_sym("\\")) {
      next();
      Sym x = ident();
      expect_sym(".");
      return at(tm::lam(x, term()), t);
    }
    if (is_kw("forall")) {
      next();
      BinderKind k;
      Sym n;
      if (!binder(k, n)) fail("Syntax", "expected binder after 'forall'");
      expect_sym(".");
      Term g;
      g.tag = Term::Gen;
      g.x = n;
      g.code = int(k);
      g.args = {term()};
      return at(std::make_shared<const Term>(std::move(g)), t);
    }
    if (is_kw("case")) {
      next();
      TermP s = term();
      expect_kw("of");
      expect_sym("{");
      std::vector<Alt> alts;
      for (;;) {
        alts.push_back(alt());
        if (is_sym(";")) {
          next();
          if (is_sym("}")) break;
          continue;
        }
        break;
      }
      expect_sym("}");
      return at(tm::cas(s, std::move(alts)), t);
    }
    if (is_kw("seq")) {
      next();
      Sym x = ident();
      return at(tm::seq(x, term()), t);
    }
    return bind_expr();
  }

  Alt alt() {
    Alt a;
    if (is_sym("()")) {
      next();
      a.con = names::unit();
    } else if (is_sym("(")) {
      next();
      a.con = names::pair();
      a.vars.push_back(ident());
      expect_sym(",");
      a.vars.push_back(ident());
      expect_sym(")");
    } else if (peek().kind == Tk::Upper) {
      Token ct = next();
      a.con = intern(ct.text);
      auto it = ctors_.find(a.con);
      if (it == ctors_.end()) fail_at(ct, "UnknownIdentifier", "unknown constructor '" + ct.text + "'");
      while (peek().kind == Tk::Ident) a.vars.push_back(ident());
      if (int(a.vars.size()) != it->second.arity)
        fail_at(ct, "ArityMismatch", "pattern " + ct.text + " expects " + std::to_string(it->second.arity) +
                                         " variables, got " + std::to_string(a.vars.size()));
    } else {
      fail("Syntax", "expected pattern");
    }
    expect_sym("->");
    a.body = term();
    return a;
  }

  TermP operand() { return starts_prefix_form() ? term() : cmp_expr(); }

  TermP bind_expr() {
    TermP l = cmp_expr();
    while (is_sym(">>=")) {
      Token t = next();
      TermP r = operand();
      l = at(tm::mo(Mo::Bind, {l, r}), t);
    }
    return l;
  }

  TermP cmp_expr() {
    TermP l = add_expr();
    static const std::pair<const char*, Op> rels[] = {{"<=", Op::Le}, {"<", Op::Lt}, {"==", Op::Eq},
                                                      {">=", Op::Ge}, {">", Op::Gt}, {"/=", Op::Ne}};
    for (auto& [s, o] : rels) {
      if (is_sym(s)) {
        Token t = next();
        TermP r = add_expr();
        return at(tm::op(o, {l, r}), t);
      }
    }
    return l;
  }

  TermP add_expr() {
    TermP l = mul_expr();
    while (is_sym("+") || is_sym("-")) {
      Token t = next();
      Op o = t.text == "+" ? Op::Add : Op::Sub;
      l = at(tm::op(o, {l, mul_expr()}), t);
    }
    return l;
  }

  TermP mul_expr() {
    TermP l = app_expr();
    while (is_sym("*")) {
      Token t = next();
      l = at(tm::op(Op::Mul, {l, app_expr()}), t);
    }
    return l;
  }

  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tk::Ident || t.kind == Tk::Int || t.kind == Tk::Upper) return true;
    return is_sym("(") || is_sym("()");
  }

  // Saturated head: exactly n atoms, and no dangling extra atom.
  std::vector<TermP> saturated(const Token& head, int n, const std::string& what) {
    std::vector<TermP> args;
    for (int i = 0; i < n; ++i) {
      if (!starts_atom())
        fail_at(head, "ArityMismatch", what + " expects " + std::to_string(n) + " argument" +
                                           (n == 1 ? "" : "s") + ", got " + std::to_string(i));
      args.push_back(atom());
    }
    if (starts_atom())
      fail_at(head, "ArityMismatch", what + " expects " + std::to_string(n) + " argument" +
                                         (n == 1 ? "" : "s") + ", got more");
    return args;
  }

  TermP app_expr() {
    Token t = peek();
    if (t.kind == Tk::Ident) {
      if (auto o = op_by_name(t.text)) {
        next();
        std::vector<InstArg> inst;
        if (is_sym("@[")) inst = inst_args();
        auto args = saturated(t, arity(*o), t.text);
        Term r = *tm::op(*o, std::move(args));
        r.inst = std::move(inst);
        return at(std::make_shared<const Term>(std::move(r)), t);
      }
      if (auto m = mo_by_name(t.text)) {
        next();
        std::vector<InstArg> inst;
        if (is_sym("@[")) inst = inst_args();
        auto args = saturated(t, arity(*m), t.text);
        Term r = *tm::mo(*m, std::move(args));
        r.inst = std::move(inst);
        return at(std::make_shared<const Term>(std::move(r)), t);
      }
      if (t.text == "modifyRef") {
        next();
        auto args = saturated(t, 2, "modifyRef");
        return at(modify_ref(args[0], args[1]), t);
      }
    }
    if (t.kind == Tk::Upper) {
      next();
      Sym c = intern(t.text);
      auto it = ctors_.find(c);
      if (it == ctors_.end()) fail_at(t, "UnknownIdentifier", "unknown constructor '" + t.text + "'");
      auto args = saturated(t, it->second.arity, t.text);
      return at(tm::con(c, std::move(args)), t);
    }
    TermP f = atom();
    while (starts_atom()) {
      Token a = peek();
      f = at(tm::app(f, atom()), a);
    }
    return f;
  }

  TermP atom() {
    Token t = peek();
    TermP r;
    if (t.kind == Tk::Ident) {
      if (op_by_name(t.text) || mo_by_name(t.text) || t.text == "modifyRef")
        fail("ArityMismatch", "'" + t.text + "' must be applied to all its arguments (parenthesize it)");
      next();
      r = at(tm::var(intern(t.text)), t);
    } else if (t.kind == Tk::Int) {
      next();
      r = at(tm::lit(t.num), t);
    } else if (t.kind == Tk::Upper) {
      next();
      Sym c = intern(t.text);
      auto it = ctors_.find(c);
      if (it == ctors_.end()) fail_at(t, "UnknownIdentifier", "unknown constructor '" + t.text + "'");
      if (it->second.arity != 0)
        fail_at(t, "ArityMismatch", t.text + " expects " + std::to_string(it->second.arity) +
                                        " arguments; parenthesize the application");
      r = at(tm::con(c, {}), t);
    } else if (is_sym("()")) {
      next();
      r = at(tm::con(names::unit(), {}), t);
    } else if (is_sym("(")) {
      next();
      TermP a = term();
      if (is_sym(",")) {
        next();
        TermP b = term();
        expect_sym(")");
        r = at(tm::con(names::pair(), {a, b}), t);
      } else if (is_sym(":")) {
        next();
        Term an;
        an.tag = Term::Ann;
        an.args = {a};
        an.ty = type();
        expect_sym(")");
        r = at(std::make_shared<const Term>(std::move(an)), t);
      } else {
        expect_sym(")");
        r = a;
      }
    } else {
      fail("Syntax", "expected term but found '" + (t.kind == Tk::End ? std::string("end of input") : t.text) + "'");
    }
    while (is_sym("@[")) {
      Token it = peek();
      Term in;
      in.tag = Term::Inst;
      in.args = {r};
      in.inst = inst_args();
      r = at(std::make_shared<const Term>(std::move(in)), it);
    }
    return r;
  }

  // modifyRef f r ≜ updateRef (\a. let1 b = f a in seq b (pure ((), b))) r
  //                  >>= (\p. case p of { (u, r2) -> case u of { () -> pure r2 } })
  TermP modify_ref(TermP f, TermP r) {
    int k = gensym_++;
    auto nm = [&](const char* s) { return intern(std::string("$") + s + std::to_string(k)); };
    Sym a = nm("a"), b = nm("b"), p = nm("p"), u = nm("u"), r2 = nm("r");
    TermP body = tm::let({{b, nullptr, tm::app(f, tm::var(a))}},
                         tm::seq(b, tm::mo(Mo::Pure, {tm::con(names::pair(), {tm::con(names::unit(), {}), tm::var(b)})})),
                         true);
    TermP upd = tm::mo(Mo::UpdateRef, {tm::lam(a, body), r});
    TermP inner = tm::cas(tm::var(u), {{names::unit(), {}, tm::mo(Mo::Pure, {tm::var(r2)})}});
    TermP k2 = tm::lam(p, tm::cas(tm::var(p), {{names::pair(), {u, r2}, inner}}));
    return tm::mo(Mo::Bind, {upd, k2});
  }
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser p(text, default_decls());
  return p.program();
}

TypeP parse_type(const std::string& text, const std::vector<DataDecl>& decls) {
  Parser p(text, decls);
  return p.whole_type();
}

}  // namespace pbo
