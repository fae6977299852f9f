#pragma once
// Concrete syntax: parsing and printing of .pbo programs.

#include <stdexcept>
#include <string>

#include "pbo/ast.hpp"

namespace pbo {

struct ParseError : std::runtime_error {
  // Syntax, UnknownOperator, ArityMismatch, DuplicateConstructor, UnknownIdentifier
  std::string code;
  int line = 0, col = 0;
  ParseError(std::string c, const std::string& msg, int l, int cl)
      : std::runtime_error(msg), code(std::move(c)), line(l), col(cl) {}
};

// Throws ParseError.
Program parse_program(const std::string& text);
TypeP parse_type(const std::string& text, const std::vector<DataDecl>& decls = default_decls());

std::string pretty_print(const TermP& t);
std::string print_type(const TypeP& t);
std::string print_lifetime(const Lifetime& l);
std::string print_mult(const Mult& m);
std::string print_program(const Program& p);
std::string print_path(const Path& p);
std::string print_history(const History& h);

}  // namespace pbo
