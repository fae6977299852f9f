#pragma once
// History algebra over borrow paths.

#include <set>
#include <stdexcept>

#include "pbo/ast.hpp"

namespace pbo {

struct DisjointnessError : std::runtime_error {
  Path path;  // first overlapping path
  explicit DisjointnessError(const Path& p);
};

// Newer records (h2) win.
History hist_seq(const History& h1, const History& h2);
// Union of domain-disjoint histories; throws DisjointnessError otherwise.
History hist_par(const History& h1, const History& h2);
// Records whose path is p or extends it.
History hist_restrict(const History& h, const Path& p);
std::set<Path> hist_domain(const History& h);
// Some recorded path is p or extends it.
bool hist_touches(const History& h, const Path& p);

HistoryP share_hist(History h);

}  // namespace pbo
