#include "pbo/report.hpp"

#include "pbo/syntax.hpp"

namespace pbo {

json diagnostic_json(const Diagnostic& d) {
  return {{"code", d.code}, {"message", d.message}, {"span", {{"line", d.line}, {"col", d.col}}}};
}

json history_json(const History& h) {
  json a = json::array();
  for (auto& [p, x] : h) a.push_back({{"path", print_path(p)}, {"var", name_of(x)}});
  return a;
}

json outcome_json(const Outcome& o) {
  json j = {{"kind", outcome_name(o.kind)}, {"steps", o.steps}};
  switch (o.kind) {
    case Outcome::ReturnedInt: j["value"] = o.value; break;
    case Outcome::BlackHole: {
      json c = json::array();
      for (Sym s : o.cycle) c.push_back(name_of(s));
      j["cycle"] = c;
      break;
    }
    default:
      if (!o.detail.empty()) j["detail"] = o.detail;
  }
  return j;
}

json trace_record_json(const TraceRecord& r, Sem sem) {
  json env = json::array();
  for (auto& [x, t] : r.env_delta) env.push_back({{"var", name_of(x)}, {"term", pretty_print(t)}});
  json j = {{"step_index", r.step_index}, {"rule_id", r.rule}, {"target_var", name_of(r.target)}, {"env_delta", env}};
  if (sem == Sem::Mut) {
    json mem = json::array();
    for (auto& [l, v] : r.mem_delta) mem.push_back({{"loc", l}, {"var", v ? json(name_of(*v)) : json(nullptr)}});
    j["mem_delta"] = mem;
  } else {
    j["bids_delta"] = r.bids_delta;
    json ev = json::array();
    for (auto& e : r.history_events)
      ev.push_back({{"token_var", name_of(e.token)},
                    {"before", e.before ? history_json(*e.before) : json(nullptr)},
                    {"after", e.after ? history_json(*e.after) : json(nullptr)}});
    j["history_events"] = ev;
  }
  return j;
}

json report_json(const Report& r) {
  json v = json::array();
  for (auto& x : r.violations) v.push_back({{"kind", x.kind}, {"message", x.message}, {"configs", x.configs}});
  json params = json::object();
  for (auto& [k, val] : r.parameters) params[k] = val;
  json j = {{"check", r.check},
            {"program", r.program},
            {"parameters", params},
            {"verdict", r.verdict},
            {"violations", v},
            {"stats",
             {{"nodes", r.nodes}, {"edges", r.edges}, {"runs", r.runs}, {"max_depth", r.max_depth}, {"wall_ms", r.wall_ms}}}};
  if (!r.values.empty()) j["values"] = r.values;
  if (!r.outcomes.empty()) j["outcomes"] = r.outcomes;
  if (r.check == "leak") j["residues"] = r.residues;
  return j;
}

json graph_json(const ReductionGraph& g, bool with_nodes) {
  json j = {{"aborted", g.aborted}, {"nodes", g.nodes.size()}, {"edges", g.edges}, {"max_depth", g.max_depth}};
  if (!with_nodes) return j;
  json ns = json::array(), es = json::array();
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    auto& n = g.nodes[i];
    char hex[40];
    std::snprintf(hex, sizeof hex, "%016llx%016llx", (unsigned long long)n.key[0], (unsigned long long)n.key[1]);
    json nj = {{"id", i}, {"depth", n.depth}, {"hash", hex}, {"normal", n.normal}, {"stuck", n.stuck}, {"expanded", n.expanded}};
    auto k = g.kept.find(i);
    if (k != g.kept.end()) nj["config"] = dump_config(k->second);
    ns.push_back(nj);
    for (auto& [to, rule] : n.succ) es.push_back({{"from", i}, {"to", to}, {"rule_id", rule}});
  }
  j["node_list"] = ns;
  j["edge_list"] = es;
  return j;
}

}  // namespace pbo
