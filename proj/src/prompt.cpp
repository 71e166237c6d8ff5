#include <sstream>

#include "preguss/synthesis.hpp"

namespace preguss {

namespace {

const char* kSystem =
    "You write ACSL annotations for MiniC programs so that a weakest-precondition verifier can prove the "
    "absence of runtime errors.\n"
    "Allowed clauses: requires P; ensures P; loop invariant P; loop assigns x, y;\n"
    "Predicates: integer constants, variables, INT_MIN, INT_MAX, + - * / %, == != < <= > >=, && || ! ==>, "
    "\\result and \\old(param) in ensures. No quantifiers, no memory predicates.\n"
    "Put clauses in fenced blocks. The info string names the anchor: ```acsl <function>``` for contract "
    "clauses, ```acsl loop <id>``` for loop clauses (ids are printed as /* loop <id> */ above each loop).\n"
    "Integers are bounded by INT_MIN and INT_MAX; arithmetic outside that range is an error.";

void line(std::ostringstream& os, const std::string& s) { os << s << '\n'; }

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::vector<Annotation> annotations_for(const FunctionDef& f, const ContractEnv& env, const TypedProgram& tp) {
  std::vector<Annotation> out;
  Contract c = env.get(f.name);
  for (const auto& r : c.requires_) out.push_back({f.id, Clause{ClauseKind::Requires, r, {}, "", f.id}});
  for (const auto& e : c.ensures) out.push_back({f.id, Clause{ClauseKind::Ensures, e, {}, "", f.id}});
  for (NodeId l : tp.info(f.name).loops) {
    if (auto it = env.loop_invariants.find(l); it != env.loop_invariants.end())
      for (const auto& p : it->second) out.push_back({l, Clause{ClauseKind::LoopInvariant, p, {}, "", l}});
    if (auto it = env.loop_assigns.find(l); it != env.loop_assigns.end())
      out.push_back({l, Clause{ClauseKind::LoopAssigns, pred::truth(), it->second, "", l}});
  }
  return out;
}

}  // namespace

std::string render_feedback(const FeedbackEntry& f) {
  std::ostringstream os;
  os << "attempt " << f.attempt + 1 << " (" << to_string(f.phase) << " phase)\n";
  if (f.candidates.empty()) {
    os << "  candidates: none\n";
  } else {
    os << "  candidates:\n";
    for (const auto& c : f.candidates) os << "    " << c << '\n';
  }
  for (const auto& v : f.vcs) {
    os << "  " << v.id << " [" << to_string(v.status) << "] " << v.description << '\n';
    if (v.status == Verdict::Valid) continue;
    os << "    " << v.formula << '\n';
    if (v.status == Verdict::Invalid) {
      os << "    counterexample:";
      if (v.witness.empty()) os << " any input";
      for (const auto& [k, val] : v.witness) os << ' ' << k << " = " << val;
      os << '\n';
    }
    if (!v.reason.empty()) os << "    reason: " << v.reason << '\n';
  }
  for (const auto& n : f.notes) os << "  note: " << n << '\n';
  return os.str();
}

std::vector<ChatMessage> render_prompt(const GeneratorRequest& req, const TypedProgram& tp, const VUnit& unit,
                                       const ContractEnv& contracts) {
  std::ostringstream os;
  const RteAssertion& a = unit.target;
  line(os, "Target: " + a.id + " (" + to_string(a.kind) + ") in " + unit.host + " at line " +
               std::to_string(a.loc.line) + ": " + req.assertion);
  if (req.phase == Phase::Host) {
    line(os, "Phase: host. Give requires clauses for " + unit.host +
                 " and loop clauses for its loops so that the assertion holds.");
  } else {
    line(os, "Phase: callees. The assertion depends on values returned by: " + join(req.callees, ", ") + ".");
    line(os, "Give ensures clauses (and loop clauses) for these functions. Requires clauses for them are "
             "prohibited in this phase and will be discarded.");
  }
  line(os, "");
  line(os, "```c");
  for (const auto& fn : unit.slice) {
    const FunctionDef* f = tp.function(fn);
    if (!f) continue;
    std::vector<Annotation> ann = annotations_for(*f, contracts, tp);
    if (fn == unit.host && a.stmt >= 0) {
      Clause c;
      c.kind = ClauseKind::Assert;
      c.label = a.label();
      c.anchor = a.stmt;
      // the assertion text is already rendered; re-parse it to attach as a comment
      try {
        Clause p = parse_clause(req.assertion);
        c.body = p.body;
        ann.push_back({a.stmt, c});
      } catch (const Error&) {
      }
    }
    os << render_function(*f, ann, true) << '\n';
  }
  line(os, "```");
  std::vector<std::string> others;
  for (const auto& [fn, c] : contracts.contracts) {
    bool in_slice = false;
    for (const auto& s : unit.slice) in_slice |= s == fn;
    if (in_slice || c.empty()) continue;
    for (const auto& r : c.requires_) others.push_back(fn + ": requires " + render(r) + ";");
    for (const auto& e : c.ensures) others.push_back(fn + ": ensures " + render(e) + ";");
  }
  if (!others.empty()) {
    line(os, "Contracts of functions outside the slice:");
    for (const auto& o : others) line(os, "  " + o);
  }
  if (!req.feedback.empty()) {
    line(os, "");
    line(os, "Verifier feedback on previous attempts:");
    for (const auto& f : req.feedback) os << render_feedback(f);
  }
  return {{"system", kSystem}, {"user", os.str()}};
}

}  // namespace preguss
