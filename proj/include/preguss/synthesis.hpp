#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "preguss/absint.hpp"
#include "preguss/callgraph.hpp"
#include "preguss/frontend.hpp"
#include "preguss/specs.hpp"
#include "preguss/verifier.hpp"

namespace preguss {

enum class Phase { Host, Callees };
enum class FinalVerdict { Certified, DefinitiveRTE, HighRiskAlert };

const char* to_string(Phase p);
const char* to_string(FinalVerdict v);

// ---- generator protocol ----

struct VcFeedback {
  std::string id;
  std::string kind;
  std::string description;
  std::string formula;  // hypothesis ==> goal, ACSL-subset syntax
  Verdict status = Verdict::Unknown;
  Valuation witness;
  std::string reason;
};

struct FeedbackEntry {
  Phase phase = Phase::Host;
  int attempt = 0;
  std::vector<std::string> candidates;  // rendered clauses as proposed
  std::vector<VcFeedback> vcs;
  std::vector<std::string> notes;       // dropped / stripped clauses, parse problems
};

/// Text form of one feedback entry, as shown to the generator.
std::string render_feedback(const FeedbackEntry& f);

struct ChatMessage {
  std::string role;
  std::string content;
};

/// Everything a generator may look at. The structured pointers are for
/// in-process generators; remote ones only see `messages`.
struct GeneratorRequest {
  Phase phase = Phase::Host;
  int attempt = 0;
  std::string target_id;
  std::string assertion;  // rendered `assert label: P;` of the target
  std::string host;
  std::vector<std::string> callees;  // slice callees (phase Callees: the ones whose results matter)
  std::vector<FeedbackEntry> feedback;
  std::vector<ChatMessage> messages;

  const TypedProgram* program = nullptr;
  const VUnit* unit = nullptr;
  const ContractEnv* contracts = nullptr;
  const VerificationCondition* failing = nullptr;  // last target VC
  DischargeConfig discharge;
};

struct GeneratorResponse {
  std::vector<Clause> clauses;  // anchored
  std::string raw;
  std::vector<std::string> notes;
  bool parse_empty = false;     // a reply arrived but no clause could be parsed
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

class SpecGenerator {
 public:
  virtual ~SpecGenerator() = default;
  virtual std::string name() const = 0;
  /// Throws GeneratorUnavailable when the backend cannot be reached.
  virtual GeneratorResponse generate(const GeneratorRequest& req) = 0;
};

/// Prompt messages for a request (system rules + unit description + feedback).
std::vector<ChatMessage> render_prompt(const GeneratorRequest& req, const TypedProgram& program, const VUnit& unit,
                                       const ContractEnv& contracts);

/// Deterministic generator built on the verifier's own WP and the interval analysis.
class OracleGenerator : public SpecGenerator {
 public:
  std::string name() const override { return "oracle"; }
  GeneratorResponse generate(const GeneratorRequest& req) override;
};

/// Requires candidate for the host from the WP of its target (nullopt when the
/// WP is trivially true, mentions non-parameters, or is closed).
std::optional<PredPtr> oracle_precondition(const VerificationCondition& failing, const TypedProgram& program,
                                           const std::string& host, const DischargeConfig& dc);
/// Exact `\result` description of a loop- and call-free function body.
std::optional<PredPtr> oracle_result_equation(const TypedProgram& program, const std::string& fn);

struct LlmConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string model;
  std::string api_key;
  int max_retries = 3;
  int backoff_ms = 200;   // doubled after every failed attempt
  int timeout_s = 60;

  /// PREGUSS_LLM_BASE_URL / PREGUSS_LLM_MODEL / PREGUSS_LLM_API_KEY.
  static LlmConfig from_env();
};

struct Transcript {
  std::string request_body;
  std::string response_body;
};

class LlmGenerator : public SpecGenerator {
 public:
  explicit LlmGenerator(LlmConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "llm"; }
  GeneratorResponse generate(const GeneratorRequest& req) override;
  const std::vector<Transcript>& transcripts() const { return transcripts_; }

 private:
  LlmConfig cfg_;
  std::vector<Transcript> transcripts_;
};

/// Extracts anchored clauses from fenced ```acsl blocks. The info string may
/// name a function (```acsl id) or a loop (```acsl loop 12); blocks without
/// one go to `default_fn`. Unparseable or unanchorable clauses become notes.
GeneratorResponse parse_llm_reply(const std::string& text, const TypedProgram& program,
                                  const std::string& default_fn);

/// Request body of the chat protocol.
std::string chat_request_body(const std::string& model, const std::vector<ChatMessage>& messages);

std::string fnv1a_hex(const std::string& data);

// ---- contract store ----

struct StoreEvent {
  std::string unit;
  std::string kind;
  std::string detail;
};

/// Accepted clauses of a run. Append-only; while a callee lock is held,
/// Requires writes for locked functions are refused and counted.
class ContractStore {
 public:
  explicit ContractStore(const TypedProgram& program) : program_(&program) {}

  const ContractEnv& env() const { return env_; }
  std::vector<Clause> clauses() const { return clauses_; }

  void lock_callees(const std::set<std::string>& fns) { locked_ = fns; }
  void unlock() { locked_.clear(); }
  const std::set<std::string>& locked() const { return locked_; }

  /// False (and counted) when the write violates the callee lock.
  bool add(const Clause& c, const std::string& unit);
  long violations() const { return violations_; }
  long writes() const { return writes_; }
  const std::vector<StoreEvent>& log() const { return log_; }

  std::function<void(const Clause&, bool refused)> on_write;  // test hook

 private:
  const TypedProgram* program_;
  ContractEnv env_;
  std::vector<Clause> clauses_;
  std::set<std::string> locked_;
  long violations_ = 0;
  long writes_ = 0;
  std::vector<StoreEvent> log_;
};

// ---- orchestration ----

struct SynthesisConfig {
  int max_iters = 5;
  bool continue_on_alert = false;
  bool dependency_filter = true;
  DischargeConfig discharge;
};

struct VcRecord {
  std::string id;
  std::string kind;
  Verdict status = Verdict::Unknown;
  std::string tier;
};

struct UnitRecord {
  std::string id;
  RteKind kind = RteKind::DivByZero;
  std::string host;
  std::string callee;
  Location loc;
  std::string predicate;  // width-instantiated guard, or the instantiated callee requires
  AssertionStatus analysis_status = AssertionStatus::Pending;
  FinalVerdict verdict = FinalVerdict::HighRiskAlert;
  Phase last_phase = Phase::Host;
  int host_iters = 0;
  int callee_iters = 0;
  std::vector<std::string> accepted;  // "fn: clause" / "loop N: clause"
  std::vector<Clause> accepted_clauses;
  std::vector<VcRecord> vcs;          // final VC set behind the verdict
  std::optional<Valuation> witness;   // DefinitiveRTE
  std::optional<FeedbackEntry> last_feedback;  // HighRiskAlert
  std::vector<std::string> slice;
};

struct GeneratorCall {
  std::string unit;
  Phase phase = Phase::Host;
  int attempt = 0;
  std::string request_digest;
  std::string response_digest;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  std::string request;   // full text, kept only when transcripts are saved
  std::string response;
};

struct PipelineResult {
  std::vector<UnitRecord> units;  // processed, queue order
  std::size_t queue_size = 0;
  bool stopped_early = false;
  std::vector<Clause> contracts;  // final store, acceptance order
  ContractEnv env;
  std::vector<StoreEvent> events;
  std::vector<GeneratorCall> calls;
  long prohibition_violations = 0;
  std::string annotated_source;
};

struct SynthesisHooks {
  std::function<void(const VerificationCondition&, const VerificationOutcome&)> on_vc;
  std::function<void(const Clause&, bool refused, const std::set<std::string>& locked)> on_store_write;
};

/// Processes the queue in order; contracts accepted by a unit are visible to
/// the units after it. Throws GeneratorUnavailable from the generator.
PipelineResult process_queue(const std::vector<VUnit>& queue, const TypedProgram& program,
                             SpecGenerator& gen, const SynthesisConfig& cfg, const SynthesisHooks& hooks = {},
                             const ContractEnv& initial = {});

}  // namespace preguss
