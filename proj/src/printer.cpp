#include <sstream>

#include "pbo/syntax.hpp"

namespace pbo {

std::string print_lifetime(const Lifetime& l) {
  if (l.is_static()) return "static";
  auto atom = [](const LAtom& a) {
    if (a.kind == LAtom::Meta) return "'?" + std::to_string(a.meta);
    return name_of(a.name);
  };
  if (l.atoms.size() == 1) return atom(*l.atoms.begin());
  std::string s = "(";
  bool first = true;
  for (auto& a : l.atoms) {
    if (!first) s += " & ";
    first = false;
    s += atom(a);
  }
  return s + ")";
}

std::string print_mult(const Mult& m) {
  switch (m.kind) {
    case Mult::One: return "1";
    case Mult::Many: return "w";
    case Mult::Prod: break;
  }
  std::string s;
  for (Sym v : m.vars) {
    if (!s.empty()) s += "*";
    s += name_of(v);
  }
  return s;
}

namespace {

std::string type_s(const TypeP& t, int prec);  // 0 = full, 1 = btype operand, 2 = atom

std::string paren_if(bool b, std::string s) { return b ? "(" + s + ")" : s; }

std::string type_s(const TypeP& t, int prec) {
  if (!t) return "?";
  switch (t->kind) {
    case Type::Forall: {
      std::string k = t->bkind == BinderKind::LifetimeId ? "id " : "";
      return paren_if(prec > 0, "forall " + k + name_of(t->name) + ". " + type_s(t->args[0], 0));
    }
    case Type::Fun: {
      std::string arrow = t->mult.kind == Mult::One    ? " -o "
                          : t->mult.kind == Mult::Many ? " -> "
                                                       : " -{" + print_mult(t->mult) + "}> ";
      return paren_if(prec > 0, type_s(t->args[0], 1) + arrow + type_s(t->args[1], 0));
    }
    case Type::TVar: return name_of(t->name);
    case Type::Int: return "Int";
    case Type::Linearly: return "Linearly";
    case Type::Meta: return "?" + std::to_string(t->meta);
    case Type::Data: {
      if (t->name == names::unit()) return "()";
      if (t->name == names::pair())
        return "(" + type_s(t->args[0], 0) + ", " + type_s(t->args[1], 0) + ")";
      std::string s = name_of(t->name);
      for (auto& a : t->args) s += " " + type_s(a, 2);
      return paren_if(prec > 1 && !t->args.empty(), s);
    }
    case Type::Ref: return paren_if(prec > 1, "Ref " + type_s(t->args[0], 2));
    case Type::Now: return paren_if(prec > 1, "Now " + print_lifetime(t->lft));
    case Type::End: return paren_if(prec > 1, "End " + print_lifetime(t->lft));
    case Type::Bor: {
      std::string b = t->bmeta >= 0 ? "B?" + std::to_string(t->bmeta) : t->bcon == Bcon::Mut ? "Mut" : "Share";
      return paren_if(prec > 1, b + " " + print_lifetime(t->lft) + " " + type_s(t->args[0], 2));
    }
    case Type::Lend:
      return paren_if(prec > 1, "Lend " + print_lifetime(t->lft) + " " + type_s(t->args[0], 2));
    case Type::BO:
      return paren_if(prec > 1, "BO " + print_lifetime(t->lft) + " " + type_s(t->args[0], 2));
  }
  return "?";
}

std::string inst_s(const std::vector<InstArg>& inst) {
  std::string s = "@[";
  for (size_t i = 0; i < inst.size(); ++i) {
    if (i) s += ", ";
    auto& a = inst[i];
    switch (a.kind) {
      case InstArg::Type: s += type_s(a.type, 0); break;
      case InstArg::Lifetime: s += print_lifetime(a.lft); break;
      case InstArg::Mult: s += print_mult(a.mult); break;
      case InstArg::Bcon: s += a.bcon == Bcon::Mut ? "Mut" : "Share"; break;
    }
  }
  return s + "]";
}

std::string hist_s(const HistoryP& h) { return h ? print_history(*h) : "{}"; }

// Levels: 0 = any term, 1 = application-level (no prefix forms / infix), 2 = atom.
std::string term_s(const TermP& t, int lvl);

std::string args_s(const std::vector<TermP>& args) {
  std::string s;
  for (auto& a : args) s += " " + term_s(a, 2);
  return s;
}

std::string term_s(const TermP& t, int lvl) {
  auto wrap = [&](int need, std::string s) { return lvl > need ? "(" + s + ")" : s; };
  switch (t->tag) {
    case Term::Var: return name_of(t->x);
    case Term::Lit: return std::to_string(t->n);
    case Term::Lam: return wrap(0, "\\" + name_of(t->x) + ". " + term_s(t->args[0], 0));
    case Term::App: return wrap(1, term_s(t->args[0], 1) + " " + term_s(t->args[1], 2));
    case Term::Seq: return wrap(0, "seq " + name_of(t->x) + " " + term_s(t->args[0], 0));
    case Term::Let: {
      std::string s = t->linear_let ? "let1 " : "let ";
      for (size_t i = 0; i < t->binds.size(); ++i) {
        auto& b = t->binds[i];
        if (i) s += " and ";
        s += name_of(b.name);
        if (b.ann) s += " : " + type_s(b.ann, 0);
        s += " = " + term_s(b.rhs, 0);
      }
      return wrap(0, s + " in " + term_s(t->body, 0));
    }
    case Term::Con: {
      if (t->x == names::unit() && t->args.empty()) return "()";
      if (t->x == names::pair() && t->args.size() == 2)
        return "(" + term_s(t->args[0], 0) + ", " + term_s(t->args[1], 0) + ")";
      if (t->args.empty()) return name_of(t->x);
      return wrap(1, name_of(t->x) + args_s(t->args));
    }
    case Term::Case: {
      std::string s = "case " + term_s(t->args[0], 0) + " of { ";
      for (size_t i = 0; i < t->alts.size(); ++i) {
        auto& a = t->alts[i];
        if (i) s += " ; ";
        if (a.con == names::unit()) {
          s += "()";
        } else if (a.con == names::pair() && a.vars.size() == 2) {
          s += "(" + name_of(a.vars[0]) + ", " + name_of(a.vars[1]) + ")";
        } else {
          s += name_of(a.con);
          for (Sym v : a.vars) s += " " + name_of(v);
        }
        s += " -> " + term_s(a.body, 0);
      }
      return wrap(0, s + " }");
    }
    case Term::OpApp: {
      Op o = Op(t->code);
      if ((is_iop(o) || is_irel(o)) && t->inst.empty())
        return "(" + term_s(t->args[0], 2) + " " + op_name(o) + " " + term_s(t->args[1], 2) + ")";
      std::string s = op_name(o);
      if (!t->inst.empty()) s += " " + inst_s(t->inst);
      return wrap(1, s + args_s(t->args));
    }
    case Term::MoApp: {
      Mo m = Mo(t->code);
      if (m == Mo::Bind && t->inst.empty())
        return "(" + term_s(t->args[0], 2) + " >>= " + term_s(t->args[1], 2) + ")";
      std::string s = m == Mo::Bind ? "bind" : mo_name(m);
      if (!t->inst.empty()) s += " " + inst_s(t->inst);
      return wrap(1, s + args_s(t->args));
    }
    case Term::Ann: return "(" + term_s(t->args[0], 0) + " : " + type_s(t->ty, 0) + ")";
    case Term::Gen: {
      std::string k = BinderKind(t->code) == BinderKind::LifetimeId ? "id " : "";
      return wrap(0, "forall " + k + name_of(t->x) + ". " + term_s(t->args[0], 0));
    }
    case Term::Inst: return term_s(t->args[0], 2) + " " + inst_s(t->inst);
    // runtime forms: display only
    case Term::Tok: return t->has_h ? "•" + hist_s(t->h) : "•";
    case Term::RefLoc: return wrap(1, "Ref ℓ" + std::to_string(t->n));
    case Term::RefVar: return wrap(1, "Ref " + name_of(t->x));
    case Term::Lend: return wrap(1, "Lend[b" + std::to_string(t->n) + "] " + name_of(t->x));
    case Term::Done:
      return wrap(1, std::string("Done") + (t->h ? hist_s(t->h) : "") + " " + name_of(t->x));
    case Term::Wrap: {
      std::string s = t->bcon == Bcon::Mut ? "Mut[" : "Share";
      if (t->bcon == Bcon::Mut) {
        for (size_t i = 0; i < t->paths.size(); ++i) s += (i ? "," : "") + print_path(t->paths[i]);
        s += "]";
      }
      return wrap(1, s + " " + term_s(t->args[0], 2));
    }
    case Term::XOpApp: {
      XOp x = XOp(t->code);
      std::string s = xop_name(x);
      if (x == XOp::UpdPrePost || x == XOp::UpdPost) {
        if (t->paths.empty()) {
          s += "[ℓ" + std::to_string(t->n) + "]";
        } else {
          s += "[";
          for (size_t i = 0; i < t->paths.size(); ++i) s += (i ? "," : "") + print_path(t->paths[i]);
          s += "]";
        }
      }
      if (t->has_h) s += hist_s(t->h);
      if (t->h2) s += ";" + hist_s(t->h2);
      return wrap(1, s + args_s(t->args));
    }
  }
  return "?";
}

}  // namespace

std::string print_type(const TypeP& t) { return type_s(t, 0); }

std::string pretty_print(const TermP& t) { return term_s(t, 0); }

std::string print_path(const Path& p) {
  std::string s = "b" + std::to_string(p.bid);
  for (int i : p.idx) s += "." + std::to_string(i);
  return s;
}

std::string print_history(const History& h) {
  std::string s = "{";
  bool first = true;
  for (auto& [p, v] : h) {
    if (!first) s += ", ";
    first = false;
    s += print_path(p) + "↦" + name_of(v);
  }
  return s + "}";
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  auto defaults = default_decls();
  for (auto& d : p.data_decls) {
    bool is_default = false;
    for (auto& dd : defaults)
      if (dd.name == d.name) is_default = true;
    if (is_default) continue;
    out << "data " << name_of(d.name);
    for (Sym v : d.params) out << " " << name_of(v);
    out << " =";
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      out << (i ? " | " : " ") << name_of(d.ctors[i].name);
      for (auto& [m, ft] : d.ctors[i].fields) out << " " << print_mult(m) << ":" << type_s(ft, 2);
    }
    out << " ;\n";
  }
  out << term_s(p.body, 0) << "\n";
  return out.str();
}

}  // namespace pbo
