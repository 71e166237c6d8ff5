#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include <stdexcept>

#include "preguss/report.hpp"

namespace preguss {

using json = nlohmann::ordered_json;

void RunConfig::validate() const {
  if (width != 8 && width != 16 && width != 32) throw std::invalid_argument("width must be 8, 16 or 32");
  if (generator != "oracle" && generator != "llm") throw std::invalid_argument("generator must be oracle or llm");
  if (max_iters < 1) throw std::invalid_argument("max-iters must be at least 1");
}

std::vector<RteAssertion> queued_assertions(const AnalysisResult& analysis, const CallGraph& cg,
                                            const TypedProgram& program) {
  std::vector<RteAssertion> out;
  for (auto& a : collect_assertions(analysis, cg, program))
    if (a.status != AssertionStatus::Proven) out.push_back(std::move(a));
  return out;
}

std::string instrumented_source(const TypedProgram& program, const AnalysisResult& analysis) {
  std::vector<Annotation> ann;
  for (const auto& a : analysis.assertions) {
    if (a.status != AssertionStatus::Alarm) continue;
    Clause c;
    c.kind = ClauseKind::Assert;
    c.label = a.label();
    c.body = instantiate_width(a.predicate, program.width());
    c.anchor = a.stmt;
    ann.push_back({a.stmt, c});
  }
  return render(program.program(), ann);
}

namespace {

json valuation(const Valuation& v) {
  json j = json::object();
  for (const auto& [k, val] : v) j[k] = val;
  return j;
}

json assertion_json(const RteAssertion& a, IntWidth w) {
  json j;
  j["id"] = a.id;
  j["kind"] = to_string(a.kind);
  j["host"] = a.host;
  if (!a.callee.empty()) j["callee"] = a.callee;
  j["line"] = a.loc.line;
  j["column"] = a.loc.column;
  j["predicate"] = render(instantiate_width(a.predicate, w));
  j["status"] = to_string(a.status);
  return j;
}

json common(const std::string& command, const std::string& file, const std::string& source, const RunConfig& cfg,
            const AnalysisResult& analysis, const std::vector<VUnit>& queue, IntWidth w) {
  json r;
  r["schema_version"] = "1.0";
  r["command"] = command;
  r["program"] = {{"file", file}, {"digest", "fnv1a64:" + fnv1a_hex(source)}};
  r["config"] = {{"width", cfg.width},
                 {"generator", cfg.generator},
                 {"max_iters", cfg.max_iters},
                 {"continue_on_alert", cfg.continue_on_alert},
                 {"dependency_filter", cfg.dependency_filter},
                 {"save_transcripts", cfg.save_transcripts}};
  json counts = json::object();
  for (RteKind k : {RteKind::DivByZero, RteKind::SignedOverflow, RteKind::CallSitePrecondition})
    counts[to_string(k)] = {{"Proven", 0}, {"Alarm", 0}, {"Pending", 0}};
  json list = json::array();
  for (const auto& a : analysis.assertions) {
    counts[to_string(a.kind)][to_string(a.status)] = counts[to_string(a.kind)][to_string(a.status)].get<int>() + 1;
    list.push_back(assertion_json(a, w));
  }
  for (const auto& v : queue)
    if (v.target.kind == RteKind::CallSitePrecondition) {
      auto& c = counts["CallSitePrecondition"]["Pending"];
      c = c.get<int>() + 1;
    }
  r["analysis"] = {{"counts", counts}, {"assertions", list}};
  r["queue"] = dump_queue(queue);
  return r;
}

json timing_json(const Timing& t) {
  return {{"analysis_ms", t.analysis_ms}, {"synthesis_ms", t.synthesis_ms}, {"total_ms", t.total_ms}};
}

json feedback_json(const FeedbackEntry& f) {
  json j;
  j["phase"] = to_string(f.phase);
  j["attempt"] = f.attempt;
  j["candidates"] = f.candidates;
  j["vcs"] = json::array();
  for (const auto& v : f.vcs) {
    json e;
    e["id"] = v.id;
    e["kind"] = v.kind;
    e["description"] = v.description;
    e["status"] = to_string(v.status);
    e["formula"] = v.formula;
    if (v.status == Verdict::Invalid) e["witness"] = valuation(v.witness);
    if (!v.reason.empty()) e["reason"] = v.reason;
    j["vcs"].push_back(e);
  }
  j["notes"] = f.notes;
  return j;
}

}  // namespace

json analysis_report(const std::string& file, const std::string& source, const RunConfig& cfg,
                     const AnalysisResult& analysis, const std::vector<VUnit>& queue, const Timing& timing) {
  json r = common("analyze", file, source, cfg, analysis, queue, IntWidth::from_bits(cfg.width));
  r["timing"] = timing_json(timing);
  return r;
}

json run_report(const std::string& file, const std::string& source, const RunConfig& cfg,
                const AnalysisResult& analysis, const std::vector<VUnit>& queue, const PipelineResult& res,
                const TypedProgram& tp, const Timing& timing) {
  json r = common("run", file, source, cfg, analysis, queue, tp.width());
  json verdicts = json::array();
  int certified = 0, definitive = 0, risky = 0;
  for (const auto& u : res.units) {
    json v;
    v["id"] = u.id;
    v["kind"] = to_string(u.kind);
    v["host"] = u.host;
    if (!u.callee.empty()) v["callee"] = u.callee;
    v["line"] = u.loc.line;
    v["column"] = u.loc.column;
    v["predicate"] = u.predicate;
    v["analysis_status"] = to_string(u.analysis_status);
    v["verdict"] = to_string(u.verdict);
    v["phase"] = to_string(u.last_phase);
    v["iterations"] = {{"host", u.host_iters}, {"callees", u.callee_iters}};
    v["clauses"] = u.accepted;
    v["vcs"] = json::array();
    for (const auto& c : u.vcs) {
      json e = {{"id", c.id}, {"kind", c.kind}, {"status", to_string(c.status)}};
      if (!c.tier.empty()) e["tier"] = c.tier;
      v["vcs"].push_back(e);
    }
    if (u.witness) v["witness"] = valuation(*u.witness);
    if (u.last_feedback) v["last_feedback"] = feedback_json(*u.last_feedback);
    if (u.kind == RteKind::CallSitePrecondition) {
      // units whose accepted requires this call site has to honor
      json from = json::array();
      const FunctionDef* callee = tp.function(u.callee);
      for (const auto& o : res.units)
        for (const auto& c : o.accepted_clauses)
          if (callee && c.kind == ClauseKind::Requires && c.anchor == callee->id) {
            from.push_back(o.id);
            break;
          }
      v["requires_from"] = from;
    }
    switch (u.verdict) {
      case FinalVerdict::Certified: ++certified; break;
      case FinalVerdict::DefinitiveRTE: ++definitive; break;
      case FinalVerdict::HighRiskAlert: ++risky; break;
    }
    verdicts.push_back(v);
  }
  r["verdicts"] = verdicts;

  json contracts = json::array();
  for (const auto& f : tp.program().functions) {
    const Contract* c = res.env.find(f.name);
    if (!c || c->empty()) continue;
    json e;
    e["function"] = f.name;
    e["requires"] = json::array();
    e["ensures"] = json::array();
    for (const auto& p : c->requires_) e["requires"].push_back(render(p));
    for (const auto& p : c->ensures) e["ensures"].push_back(render(p));
    contracts.push_back(e);
  }
  r["contracts"] = contracts;
  json loops = json::array();
  for (const auto& f : tp.program().functions)
    for (NodeId l : tp.info(f.name).loops) {
      auto inv = res.env.loop_invariants.find(l);
      auto as = res.env.loop_assigns.find(l);
      if (inv == res.env.loop_invariants.end() && as == res.env.loop_assigns.end()) continue;
      json e;
      e["loop"] = l;
      e["function"] = f.name;
      e["invariants"] = json::array();
      if (inv != res.env.loop_invariants.end())
        for (const auto& p : inv->second) e["invariants"].push_back(render(p));
      e["assigns"] = as != res.env.loop_assigns.end() ? json(as->second) : json::array();
      loops.push_back(e);
    }
  r["loop_annotations"] = loops;

  json events = json::array();
  for (const auto& e : res.events) events.push_back({{"unit", e.unit}, {"kind", e.kind}, {"detail", e.detail}});
  r["events"] = events;
  json tr = json::array();
  for (const auto& c : res.calls) {
    json e;
    e["unit"] = c.unit;
    e["phase"] = to_string(c.phase);
    e["attempt"] = c.attempt;
    e["request_digest"] = c.request_digest;
    e["response_digest"] = c.response_digest;
    e["prompt_tokens"] = c.prompt_tokens;
    e["completion_tokens"] = c.completion_tokens;
    if (cfg.save_transcripts) {
      e["request"] = c.request;
      e["response"] = c.response;
    }
    tr.push_back(e);
  }
  r["transcripts"] = tr;
  r["summary"] = {{"queued", res.queue_size},
                  {"processed", res.units.size()},
                  {"certified", certified},
                  {"definitive_rte", definitive},
                  {"high_risk", risky},
                  {"stopped_early", res.stopped_early},
                  {"generator_calls", res.calls.size()},
                  {"prohibition_violations", res.prohibition_violations}};
  r["timing"] = timing_json(timing);
  return r;
}

const std::string& report_schema() {
  static const std::string schema =
#include "report_schema.inc"
      ;
  return schema;
}

std::string validate_report(const json& report) {
  static const rapidjson::SchemaDocument* schema = [] {
    rapidjson::Document d;
    d.Parse(report_schema().c_str());
    if (d.HasParseError())
      throw std::logic_error(std::string("report schema does not parse: ") + rapidjson::GetParseError_En(d.GetParseError()));
    return new rapidjson::SchemaDocument(d);
  }();
  rapidjson::Document doc;
  std::string text = report.dump();
  doc.Parse(text.c_str());
  if (doc.HasParseError()) return "report is not JSON";
  rapidjson::SchemaValidator v(*schema);
  if (doc.Accept(v)) return "";
  rapidjson::StringBuffer where, what;
  v.GetInvalidSchemaPointer().StringifyUriFragment(where);
  v.GetInvalidDocumentPointer().StringifyUriFragment(what);
  return std::string("keyword '") + v.GetInvalidSchemaKeyword() + "' failed at " + what.GetString() +
         " (schema " + where.GetString() + ")";
}

json without_timing(json report) {
  report.erase("timing");
  return report;
}

}  // namespace preguss
