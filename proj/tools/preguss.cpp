#include <CLI11.hpp>

#include <iostream>

#include "preguss/report.hpp"

namespace {

void common_options(CLI::App* cmd, preguss::RunConfig& cfg) {
  cmd->add_option("inputs", cfg.inputs, "MiniC source files")->required();
  cmd->add_option("--width", cfg.width, "int width in bits (8, 16, 32)")->check(CLI::IsMember({8, 16, 32}));
  cmd->add_option("--generator", cfg.generator, "specification generator")->check(CLI::IsMember({"oracle", "llm"}));
  cmd->add_option("--max-iters", cfg.max_iters, "generator calls per phase")->check(CLI::PositiveNumber);
  cmd->add_option("--report", cfg.report, "JSON report file (directory with several inputs)");
  cmd->add_option("--annotated", cfg.annotated, "write the annotated source here instead of stdout");
  cmd->add_flag("--dump-queue", cfg.dump_queue, "print the verification unit queue");
  cmd->add_flag("--continue-on-alert", cfg.continue_on_alert, "keep going after a high-risk alert");
  cmd->add_flag("--no-dependency-filter{false}", cfg.dependency_filter, "keep every direct callee in the slices");
  cmd->add_flag("--save-transcripts", cfg.save_transcripts, "store full generator transcripts in the report");
  cmd->add_option("--smt-solver", cfg.smt_solver, "SMT-LIB solver executable used as the last discharge tier");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"preguss: runtime-error certification for MiniC"};
  app.require_subcommand(1);

  preguss::RunConfig analyze_cfg, run_cfg, smt_cfg;
  CLI::App* analyze = app.add_subcommand("analyze", "interval analysis; prints the instrumented source");
  common_options(analyze, analyze_cfg);
  CLI::App* run = app.add_subcommand("run", "full pipeline; prints the annotated source");
  common_options(run, run_cfg);
  CLI::App* smt = app.add_subcommand("export-smt", "write the VCs of selected assertions as SMT-LIB v2");
  common_options(smt, smt_cfg);
  std::vector<std::string> ids;
  std::string out_dir = "smt";
  smt->add_option("--id", ids, "assertion id, e.g. overflow@7 (repeatable)");
  smt->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*analyze) return preguss::cmd_analyze(analyze_cfg, std::cout, std::cerr);
  if (*run) return preguss::cmd_run(run_cfg, std::cout, std::cerr);
  return preguss::cmd_export_smt(smt_cfg, ids, out_dir, std::cout, std::cerr);
}
