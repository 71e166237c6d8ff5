#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "preguss/report.hpp"

namespace preguss {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::string read_source(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(path + ": cannot read file");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(path + ": cannot write file");
  f << text;
}

std::string report_path(const RunConfig& cfg, const std::string& input) {
  if (cfg.report.empty()) return "";
  if (cfg.inputs.size() == 1) return cfg.report;
  return (fs::path(cfg.report) / (fs::path(input).stem().string() + ".report.json")).string();
}

void emit_report(const RunConfig& cfg, const std::string& input, const json& report) {
  std::string why = validate_report(report);
  if (!why.empty()) throw std::logic_error("report fails its schema: " + why);
  std::string path = report_path(cfg, input);
  if (!path.empty()) write_text(path, report.dump(2) + "\n");
}

void emit_source(const RunConfig& cfg, const std::string& input, const std::string& text, std::ostream& out) {
  if (cfg.annotated.empty()) {
    out << text;
    return;
  }
  std::string path = cfg.inputs.size() == 1
                         ? cfg.annotated
                         : (fs::path(cfg.annotated) / fs::path(input).filename()).string();
  write_text(path, text);
}

struct Front {
  std::string source;
  TypedProgram tp;
  CallGraph cg;
  AnalysisResult analysis;
  std::vector<VUnit> queue;
  double analysis_ms = 0;
};

Front front(const RunConfig& cfg, const std::string& input) {
  Clock::time_point t = Clock::now();
  Front f;
  f.source = read_source(input);
  f.tp = load(f.source, IntWidth::from_bits(cfg.width), input);
  f.cg = build_call_graph(f.tp);
  f.analysis = analyze(f.tp);
  f.queue = build_queue(queued_assertions(f.analysis, f.cg, f.tp), f.tp, f.cg, {}, cfg.dependency_filter);
  f.analysis_ms = ms_since(t);
  return f;
}

std::unique_ptr<SpecGenerator> make_generator(const RunConfig& cfg) {
  if (cfg.generator == "llm") return std::make_unique<LlmGenerator>(LlmConfig::from_env());
  return std::make_unique<OracleGenerator>();
}

SynthesisConfig synthesis_config(const RunConfig& cfg) {
  SynthesisConfig s;
  s.max_iters = cfg.max_iters;
  s.continue_on_alert = cfg.continue_on_alert;
  s.dependency_filter = cfg.dependency_filter;
  s.discharge.width = IntWidth::from_bits(cfg.width);
  s.discharge.smt_solver = cfg.smt_solver;
  return s;
}

// runs one input; returns its exit code
template <typename Body>
int guarded(const std::string& input, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const MutualRecursionError& e) {
    err << input << ": " << e.what() << '\n';
  } catch (const GeneratorUnavailable& e) {
    err << input << ": generator unavailable: " << e.what() << '\n';
  } catch (const Error& e) {
    err << e.what() << '\n';
  } catch (const std::exception& e) {
    err << input << ": internal error: " << e.what() << '\n';
  }
  return 2;
}

int check_config(const RunConfig& cfg, std::ostream& err) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (cfg.inputs.empty()) {
    err << "error: no input file\n";
    return 2;
  }
  return 0;
}

}  // namespace

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (int c = check_config(cfg, err)) return c;
  int code = 0;
  for (const auto& input : cfg.inputs) {
    int c = guarded(input, err, [&] {
      Clock::time_point t = Clock::now();
      Front f = front(cfg, input);
      if (cfg.dump_queue) out << dump_queue(f.queue).dump(2) << '\n';
      Timing tm{f.analysis_ms, 0, ms_since(t)};
      emit_report(cfg, input, analysis_report(input, f.source, cfg, f.analysis, f.queue, tm));
      emit_source(cfg, input, instrumented_source(f.tp, f.analysis), out);
      return f.analysis.count(AssertionStatus::Alarm) > 0 ? 1 : 0;
    });
    code = std::max(code, c);
  }
  return code;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (int c = check_config(cfg, err)) return c;
  int code = 0;
  for (const auto& input : cfg.inputs) {
    int c = guarded(input, err, [&] {
      Clock::time_point t = Clock::now();
      Front f = front(cfg, input);
      if (cfg.dump_queue) out << dump_queue(f.queue).dump(2) << '\n';
      auto gen = make_generator(cfg);
      Clock::time_point ts = Clock::now();
      PipelineResult res = process_queue(f.queue, f.tp, *gen, synthesis_config(cfg));
      Timing tm{f.analysis_ms, ms_since(ts), ms_since(t)};
      emit_report(cfg, input, run_report(input, f.source, cfg, f.analysis, f.queue, res, f.tp, tm));
      emit_source(cfg, input, res.annotated_source, out);
      bool clean = !res.stopped_early;
      for (const auto& u : res.units) {
        if (u.verdict == FinalVerdict::Certified) continue;
        clean = false;
        err << input << ":" << u.loc.line << ":" << u.loc.column << ": " << to_string(u.verdict) << " " << u.id
            << " (" << u.predicate << ")\n";
      }
      return clean ? 0 : 1;
    });
    code = std::max(code, c);
  }
  return code;
}

int cmd_export_smt(const RunConfig& cfg, const std::vector<std::string>& ids, const std::string& out_dir,
                   std::ostream& out, std::ostream& err) {
  if (int c = check_config(cfg, err)) return c;
  if (ids.empty()) return 0;
  if (cfg.inputs.size() != 1) {
    err << "error: export-smt takes exactly one input\n";
    return 2;
  }
  const std::string& input = cfg.inputs[0];
  return guarded(input, err, [&] {
    Front f = front(cfg, input);
    auto gen = make_generator(cfg);
    SynthesisConfig sc = synthesis_config(cfg);
    sc.continue_on_alert = true;
    PipelineResult res = process_queue(f.queue, f.tp, *gen, sc);
    std::vector<RteAssertion> all = collect_assertions(f.analysis, f.cg, f.tp);
    for (const auto& id : ids) {
      const RteAssertion* a = nullptr;
      for (const auto& x : all)
        if (x.id == id) a = &x;
      if (!a) {
        err << input << ": unknown assertion id '" << id << "'\n";
        return 2;
      }
      VUnit v = build_vunit(*a, f.tp, f.cg, res.env, cfg.dependency_filter);
      std::vector<Clause> clauses;
      for (const auto& u : res.units)
        if (u.id == id) clauses = u.accepted_clauses;
      IntWidth w = f.tp.width();
      for (const auto& vc : gen_vcs(v, clauses, f.tp)) {
        std::string name = vc.id;
        for (char& ch : name)
          if (ch == '#' || ch == '/') ch = '.';
        fs::path p = fs::path(out_dir) / (name + ".smt2");
        write_text(p.string(), to_smtlib(vc, w));
        out << p.string() << '\n';
      }
    }
    return 0;
  });
}

}  // namespace preguss
