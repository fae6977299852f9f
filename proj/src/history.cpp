#include "pbo/history.hpp"

#include "pbo/syntax.hpp"

namespace pbo {

DisjointnessError::DisjointnessError(const Path& p)
    : std::runtime_error("overlapping histories at " + print_path(p)), path(p) {}

History hist_seq(const History& h1, const History& h2) {
  History r = h1;
  for (auto& [p, v] : h2) r[p] = v;
  return r;
}

History hist_par(const History& h1, const History& h2) {
  History r = h1;
  for (auto& [p, v] : h2)
    if (!r.emplace(p, v).second) throw DisjointnessError(p);
  return r;
}

History hist_restrict(const History& h, const Path& p) {
  History r;
  // paths sharing the bid and prefix sort contiguously after p
  for (auto it = h.lower_bound(p); it != h.end() && it->first.extends(p); ++it) r.insert(*it);
  return r;
}

std::set<Path> hist_domain(const History& h) {
  std::set<Path> d;
  for (auto& kv : h) d.insert(kv.first);
  return d;
}

bool hist_touches(const History& h, const Path& p) {
  auto it = h.lower_bound(p);
  return it != h.end() && it->first.extends(p);
}

HistoryP share_hist(History h) {
  if (h.empty()) return hist_empty();
  return std::make_shared<const History>(std::move(h));
}

}  // namespace pbo
