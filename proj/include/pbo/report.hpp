#pragma once
// JSON forms of diagnostics, outcomes, traces and checker reports.

#include <json.hpp>

#include "pbo/harness.hpp"
#include "pbo/types.hpp"

namespace pbo {

using json = nlohmann::ordered_json;

json diagnostic_json(const Diagnostic& d);
json history_json(const History& h);  // [{"path":"b3.0.1","var":"x#17"}, ...]
json outcome_json(const Outcome& o);
json trace_record_json(const TraceRecord& r, Sem sem);
json report_json(const Report& r);
json graph_json(const ReductionGraph& g, bool with_nodes);

}  // namespace pbo
