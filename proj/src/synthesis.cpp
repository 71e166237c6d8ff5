#include <algorithm>
#include <cctype>

#include "preguss/synthesis.hpp"

namespace preguss {

const char* to_string(Phase p) { return p == Phase::Host ? "host" : "callees"; }

const char* to_string(FinalVerdict v) {
  switch (v) {
    case FinalVerdict::Certified: return "Certified";
    case FinalVerdict::DefinitiveRTE: return "DefinitiveRTE";
    case FinalVerdict::HighRiskAlert: return "HighRiskAlert";
  }
  return "?";
}

namespace {

const std::string kRet = "__ret_";

// callee name of a call-result symbol __ret_<callee>_<id>
std::string callee_of_symbol(const std::string& s) {
  if (s.rfind(kRet, 0) != 0) return "";
  std::size_t u = s.rfind('_');
  if (u == std::string::npos || u <= kRet.size()) return "";
  for (std::size_t i = u + 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return "";
  return s.substr(kRet.size(), u - kRet.size());
}

std::vector<std::string> result_callees(const VerificationCondition& vc) {
  std::vector<std::string> out;
  for (const auto& v : free_vars(vc.formula())) {
    std::string c = callee_of_symbol(v);
    if (!c.empty() && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

bool mentions_call_result(const VerificationCondition& vc) { return !result_callees(vc).empty(); }

const FunctionDef* function_by_id(const TypedProgram& tp, NodeId id) {
  for (const auto& f : tp.program().functions)
    if (f.id == id) return &f;
  return nullptr;
}

// function a clause constrains (the owner for loop clauses)
std::string clause_function(const Clause& c, const TypedProgram& tp) {
  if (const FunctionDef* f = function_by_id(tp, c.anchor)) return f->name;
  return tp.has_node(c.anchor) ? tp.owner(c.anchor) : "";
}

std::string clause_text(const Clause& c, const TypedProgram& tp) {
  if (c.is_loop_clause()) return "loop " + std::to_string(c.anchor) + ": " + render_clause(c);
  return clause_function(c, tp) + ": " + render_clause(c);
}

VcRecord record_of(const VerificationCondition& vc, const VerificationOutcome& o) {
  return {vc.id, to_string(vc.kind), o.status, o.tier};
}

VcFeedback feedback_of(const VerificationCondition& vc, const VerificationOutcome& o) {
  VcFeedback f;
  f.id = vc.id;
  f.kind = to_string(vc.kind);
  f.description = vc.description;
  f.formula = render(vc.formula());
  f.status = o.status;
  f.witness = o.witness;
  f.reason = o.reason;
  if (!vc.missing_invariants.empty()) {
    std::set<NodeId> loops;
    for (const auto& [sym, l] : vc.missing_invariants) loops.insert(l);
    std::string ls;
    for (NodeId l : loops) ls += (ls.empty() ? "" : ", ") + std::to_string(l);
    f.reason += (f.reason.empty() ? "" : "; ") + std::string("missing loop invariant for loop ") + ls;
  }
  return f;
}

std::string join_messages(const std::vector<ChatMessage>& ms) {
  std::string s;
  for (const auto& m : ms) s += m.role + "\n" + m.content + "\n";
  return s;
}

class Runner {
 public:
  Runner(const TypedProgram& tp, SpecGenerator& gen, const SynthesisConfig& cfg,
         const SynthesisHooks& hooks, const ContractEnv& initial)
      : tp_(tp), gen_(gen), cfg_(cfg), hooks_(hooks), store_(tp) {
    store_.on_write = [this](const Clause& c, bool refused) {
      if (hooks_.on_store_write) hooks_.on_store_write(c, refused, store_.locked());
    };
    seed(initial);
  }

  PipelineResult run(const std::vector<VUnit>& queue) {
    res_.queue_size = queue.size();
    for (const auto& v : queue) {
      UnitRecord rec = process(v);
      bool stop = rec.verdict == FinalVerdict::HighRiskAlert && !cfg_.continue_on_alert;
      res_.units.push_back(std::move(rec));
      if (stop) {
        res_.stopped_early = res_.units.size() < queue.size();
        event(v.target.id, "stop", "high-risk alert, remaining units skipped");
        break;
      }
    }
    res_.contracts = store_.clauses();
    res_.env = store_.env();
    res_.prohibition_violations = store_.violations();
    std::vector<Annotation> ann;
    for (const auto& c : res_.contracts) ann.push_back({c.anchor, c});
    res_.annotated_source = render(tp_.program(), ann);
    return std::move(res_);
  }

 private:
  enum class PhaseResult { Success, NeedsCallees, Failed };

  void seed(const ContractEnv& initial) {
    for (const auto& [fn, c] : initial.contracts) {
      const FunctionDef* f = tp_.function(fn);
      if (!f) continue;
      for (const auto& r : c.requires_) commit(Clause{ClauseKind::Requires, r, {}, "", f->id}, "initial");
      for (const auto& e : c.ensures) commit(Clause{ClauseKind::Ensures, e, {}, "", f->id}, "initial");
    }
    for (const auto& [l, ps] : initial.loop_invariants)
      for (const auto& p : ps) commit(Clause{ClauseKind::LoopInvariant, p, {}, "", l}, "initial");
  }

  void event(const std::string& unit, const std::string& kind, const std::string& detail) {
    res_.events.push_back({unit, kind, detail});
  }

  bool commit(const Clause& c, const std::string& unit) {
    std::size_t before = store_.log().size();
    bool ok = store_.add(c, unit);
    if (store_.log().size() > before) res_.events.push_back(store_.log().back());
    return ok;
  }

  VerificationOutcome check(const VerificationCondition& vc) {
    VerificationOutcome o = discharge(vc, cfg_.discharge);
    if (hooks_.on_vc) hooks_.on_vc(vc, o);
    return o;
  }

  std::string assertion_text(const VUnit& v) {
    const RteAssertion& a = v.target;
    PredPtr p = a.predicate;
    if (a.kind == RteKind::CallSitePrecondition) {
      const Expr* call = tp_.expr(a.node);
      const FunctionDef* f = tp_.function(a.callee);
      Bindings b;
      for (std::size_t i = 0; f && call && i < f->params.size() && i < call->operands.size(); ++i)
        b[f->params[i].name] = expr_to_term(*call->operands[i], tp_);
      return render(substitute(store_.env().get(a.callee).requires_conj(), b));
    }
    return render(instantiate_width(p, tp_.width()));
  }

  GeneratorResponse ask(VUnit& v, UnitRecord& rec, Phase phase, int attempt, const std::vector<FeedbackEntry>& history,
                        const VerificationCondition& failing, const std::vector<std::string>& callees) {
    GeneratorRequest req;
    req.phase = phase;
    req.attempt = attempt;
    req.target_id = v.target.id;
    req.assertion = "assert " + v.target.label() + ": " + rec.predicate + ";";
    req.host = v.host;
    req.callees = callees;
    req.feedback = history;
    req.program = &tp_;
    req.unit = &v;
    req.contracts = &store_.env();
    req.failing = &failing;
    req.discharge = cfg_.discharge;
    req.messages = render_prompt(req, tp_, v, store_.env());
    GeneratorResponse resp = gen_.generate(req);
    GeneratorCall call;
    call.unit = v.target.id;
    call.phase = phase;
    call.attempt = attempt;
    call.request = join_messages(req.messages);
    call.response = resp.raw;
    call.request_digest = fnv1a_hex(call.request);
    call.response_digest = fnv1a_hex(call.response);
    call.prompt_tokens = resp.prompt_tokens;
    call.completion_tokens = resp.completion_tokens;
    res_.calls.push_back(std::move(call));
    return resp;
  }

  std::vector<std::pair<VerificationCondition, VerificationOutcome>> verify(const VUnit& v,
                                                                           const std::vector<Clause>& cands) {
    std::vector<std::pair<VerificationCondition, VerificationOutcome>> out;
    for (auto& vc : gen_vcs(v, cands, tp_)) {
      VerificationOutcome o = check(vc);
      out.emplace_back(std::move(vc), std::move(o));
    }
    return out;
  }

  static bool all_valid(const std::vector<std::pair<VerificationCondition, VerificationOutcome>>& r) {
    return std::all_of(r.begin(), r.end(), [](const auto& p) { return p.second.status == Verdict::Valid; });
  }

  PhaseResult host_phase(VUnit& v, UnitRecord& rec, std::vector<FeedbackEntry>& history,
                         VerificationCondition& failing) {
    rec.last_phase = Phase::Host;
    for (int k = 0; k < cfg_.max_iters; ++k) {
      v.contracts = store_.env();
      ++rec.host_iters;
      GeneratorResponse resp = ask(v, rec, Phase::Host, k, history, failing, {v.slice.begin() + 1, v.slice.end()});
      FeedbackEntry fe;
      fe.phase = Phase::Host;
      fe.attempt = k;
      fe.notes = resp.notes;
      std::vector<Clause> kept;
      for (const auto& c : resp.clauses) {
        std::string text = clause_text(c, tp_);
        fe.candidates.push_back(text);
        if (auto err = clause_scope_error(c, tp_)) {
          fe.notes.push_back("dropped `" + text + "`: " + *err);
          continue;
        }
        std::string fn = clause_function(c, tp_);
        bool ok = fn == v.host && (c.kind == ClauseKind::Requires || c.is_loop_clause());
        if (!ok) {
          fe.notes.push_back("dropped `" + text + "`: host phase accepts requires and loop clauses of " + v.host);
          continue;
        }
        if (c.kind == ClauseKind::Requires && tp_.has_entry() && fn == tp_.entry()) {
          fe.notes.push_back("dropped `" + text + "`: the entry function takes no precondition");
          continue;
        }
        kept.push_back(c);
      }
      if (kept.empty()) {
        if (!resp.parse_empty) fe.notes.push_back("no usable candidate");
        history.push_back(std::move(fe));
        continue;
      }
      auto results = verify(v, kept);
      for (const auto& [vc, o] : results) fe.vcs.push_back(feedback_of(vc, o));
      history.push_back(std::move(fe));
      if (all_valid(results)) {
        std::vector<Clause> final_set = kept;
        for (std::size_t i = 0; i < final_set.size();) {
          std::vector<Clause> fewer = final_set;
          fewer.erase(fewer.begin() + static_cast<long>(i));
          auto r2 = verify(v, fewer);
          if (all_valid(r2)) {
            event(v.target.id, "retention-drop", clause_text(final_set[i], tp_));
            final_set = std::move(fewer);
            results = std::move(r2);
          } else {
            ++i;
          }
        }
        for (const auto& c : final_set)
          if (commit(c, v.target.id)) {
          rec.accepted.push_back(clause_text(c, tp_));
          rec.accepted_clauses.push_back(c);
        }
        rec.vcs.clear();
        for (const auto& [vc, o] : results) rec.vcs.push_back(record_of(vc, o));
        return PhaseResult::Success;
      }
      failing = results.front().first;
      if (results.front().second.status != Verdict::Valid && mentions_call_result(failing))
        return PhaseResult::NeedsCallees;
    }
    return PhaseResult::Failed;
  }

  PhaseResult callee_phase(VUnit& v, UnitRecord& rec, std::vector<FeedbackEntry>& history,
                           VerificationCondition& failing) {
    rec.last_phase = Phase::Callees;
    for (int k = 0; k < cfg_.max_iters; ++k) {
      std::vector<std::string> targets;
      for (const auto& c : result_callees(failing))
        if (tp_.function(c)) targets.push_back(c);
      if (targets.empty()) return PhaseResult::Failed;
      store_.lock_callees({targets.begin(), targets.end()});
      v.contracts = store_.env();
      ++rec.callee_iters;
      GeneratorResponse resp = ask(v, rec, Phase::Callees, k, history, failing, targets);
      FeedbackEntry fe;
      fe.phase = Phase::Callees;
      fe.attempt = k;
      fe.notes = resp.notes;
      std::vector<Clause> kept;
      for (const auto& c : resp.clauses) {
        std::string text = clause_text(c, tp_);
        fe.candidates.push_back(text);
        if (c.kind == ClauseKind::Requires) {
          fe.notes.push_back("stripped `" + text + "`: requires clauses are prohibited in the callee phase");
          event(v.target.id, "prohibition-strip", text);
          continue;
        }
        if (auto err = clause_scope_error(c, tp_)) {
          fe.notes.push_back("dropped `" + text + "`: " + *err);
          continue;
        }
        std::string fn = clause_function(c, tp_);
        bool ok = std::find(targets.begin(), targets.end(), fn) != targets.end() &&
                  (c.kind == ClauseKind::Ensures || c.is_loop_clause());
        if (!ok) {
          fe.notes.push_back("dropped `" + text + "`: callee phase accepts ensures and loop clauses of the callees");
          continue;
        }
        kept.push_back(c);
      }
      if (kept.empty()) {
        if (!resp.parse_empty) fe.notes.push_back("no usable candidate");
        history.push_back(std::move(fe));
        continue;
      }
      // establishment: a callee's clauses go in only if all of its own VCs hold
      auto results = verify(v, kept);
      std::set<std::string> broken;
      for (std::size_t i = 1; i < results.size(); ++i) {
        fe.vcs.push_back(feedback_of(results[i].first, results[i].second));
        if (results[i].second.status != Verdict::Valid) broken.insert(results[i].first.function);
      }
      std::vector<VcRecord> established;
      for (std::size_t i = 1; i < results.size(); ++i)
        if (!broken.count(results[i].first.function)) established.push_back(record_of(results[i].first, results[i].second));
      for (const auto& c : kept) {
        std::string fn = clause_function(c, tp_);
        if (broken.count(fn)) continue;
        if (commit(c, v.target.id)) {
          rec.accepted.push_back(clause_text(c, tp_));
          rec.accepted_clauses.push_back(c);
        }
      }
      v.contracts = store_.env();
      VerificationCondition t = target_vc(v, v.contracts, tp_);
      VerificationOutcome o = check(t);
      fe.vcs.insert(fe.vcs.begin(), feedback_of(t, o));
      history.push_back(std::move(fe));
      failing = t;
      if (o.status == Verdict::Valid) {
        store_.unlock();
        rec.vcs.clear();
        rec.vcs.push_back(record_of(t, o));
        for (auto& r : established) rec.vcs.push_back(r);
        return PhaseResult::Success;
      }
      if (!mentions_call_result(t)) break;
    }
    store_.unlock();
    return PhaseResult::Failed;
  }

  UnitRecord process(VUnit v) {
    const RteAssertion& a = v.target;
    UnitRecord rec;
    rec.id = a.id;
    rec.kind = a.kind;
    rec.host = v.host;
    rec.callee = a.callee;
    rec.loc = a.loc;
    rec.analysis_status = a.status;
    rec.slice = v.slice;
    rec.predicate = assertion_text(v);
    v.contracts = store_.env();

    VerificationCondition tvc = target_vc(v, v.contracts, tp_);
    VerificationOutcome tout = check(tvc);
    if (tout.status == Verdict::Valid) {
      rec.verdict = FinalVerdict::Certified;
      rec.vcs.push_back(record_of(tvc, tout));
      return rec;
    }
    VerificationCondition dvc = definitive_vc(v, v.contracts, tp_);
    VerificationOutcome dout = check(dvc);
    if (dout.status == Verdict::Valid) {
      rec.verdict = FinalVerdict::DefinitiveRTE;
      rec.witness = tout.status == Verdict::Invalid ? tout.witness : Valuation{};
      rec.vcs.push_back(record_of(tvc, tout));
      rec.vcs.push_back(record_of(dvc, dout));
      return rec;
    }

    std::vector<FeedbackEntry> history;
    VerificationCondition failing = tvc;
    bool host_done = false, callees_done = false;
    Phase next = mentions_call_result(tvc) ? Phase::Callees : Phase::Host;
    while (true) {
      PhaseResult r;
      if (next == Phase::Host && !host_done) {
        host_done = true;
        r = host_phase(v, rec, history, failing);
        if (r == PhaseResult::Success) break;
        if (r == PhaseResult::NeedsCallees && !callees_done) {
          event(a.id, "phase", "host -> callees");
          next = Phase::Callees;
          continue;
        }
      } else if (next == Phase::Callees && !callees_done) {
        callees_done = true;
        r = callee_phase(v, rec, history, failing);
        if (r == PhaseResult::Success) break;
        if (!host_done) {
          event(a.id, "phase", "callees -> host");
          next = Phase::Host;
          continue;
        }
      }
      rec.verdict = FinalVerdict::HighRiskAlert;
      VerificationOutcome fo = check(failing);
      if (history.empty()) {
        FeedbackEntry fe;
        fe.phase = next;
        fe.vcs.push_back(feedback_of(failing, fo));
        history.push_back(fe);
      }
      rec.last_feedback = history.back();
      rec.vcs.clear();
      rec.vcs.push_back(record_of(failing, fo));
      event(a.id, "alert", "unverified after " + std::to_string(rec.host_iters + rec.callee_iters) + " iterations");
      return rec;
    }
    rec.verdict = FinalVerdict::Certified;
    return rec;
  }

  const TypedProgram& tp_;
  SpecGenerator& gen_;
  const SynthesisConfig& cfg_;
  const SynthesisHooks& hooks_;
  ContractStore store_;
  PipelineResult res_;
};

}  // namespace

PipelineResult process_queue(const std::vector<VUnit>& queue, const TypedProgram& program,
                             SpecGenerator& gen, const SynthesisConfig& cfg, const SynthesisHooks& hooks,
                             const ContractEnv& initial) {
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  Runner r(program, gen, cfg, hooks, initial);
  return r.run(queue);
}

}  // namespace preguss
