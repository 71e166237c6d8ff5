#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "preguss/synthesis.hpp"

namespace preguss {

struct RunConfig {
  std::vector<std::string> inputs;
  int width = 32;
  std::string generator = "oracle";  // oracle | llm
  int max_iters = 5;
  std::string report;     // report file (one input) or directory (several); empty: none
  std::string annotated;  // annotated source file; empty: stdout
  bool dump_queue = false;
  bool continue_on_alert = false;
  bool dependency_filter = true;
  bool save_transcripts = false;
  std::string smt_solver;  // used by the discharge tier when set

  /// Throws std::invalid_argument for a width outside {8,16,32}, an unknown
  /// generator or max_iters < 1.
  void validate() const;
};

/// Assertions the queue is built from: every analysis Alarm plus every call-site precondition.
std::vector<RteAssertion> queued_assertions(const AnalysisResult& analysis, const CallGraph& cg,
                                            const TypedProgram& program);

/// Alarm guards as `assert` comments above their statements.
std::string instrumented_source(const TypedProgram& program, const AnalysisResult& analysis);

struct Timing {
  double analysis_ms = 0;
  double synthesis_ms = 0;
  double total_ms = 0;
};

nlohmann::ordered_json analysis_report(const std::string& file, const std::string& source, const RunConfig& cfg,
                                       const AnalysisResult& analysis, const std::vector<VUnit>& queue,
                                       const Timing& timing);

nlohmann::ordered_json run_report(const std::string& file, const std::string& source, const RunConfig& cfg,
                                  const AnalysisResult& analysis, const std::vector<VUnit>& queue,
                                  const PipelineResult& result, const TypedProgram& program, const Timing& timing);

/// The report schema shipped in docs/report.schema.json (compiled in).
const std::string& report_schema();
/// Empty when the document validates, else a description of the first violation.
std::string validate_report(const nlohmann::ordered_json& report);
/// Removes the timing block (the only run-dependent part of a report).
nlohmann::ordered_json without_timing(nlohmann::ordered_json report);

// Commands. Diagnostics go to `err`; the annotated source (and, with
// --dump-queue, the queue) to `out`.
int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Runs the pipeline, then writes one SMT-LIB file per VC of each selected
/// unit to `out_dir` as <vc-id>.smt2. Unknown ids exit 2.
int cmd_export_smt(const RunConfig& cfg, const std::vector<std::string>& ids, const std::string& out_dir,
                   std::ostream& out, std::ostream& err);

}  // namespace preguss
