#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "paths.hpp"
#include "preguss/report.hpp"

using preguss::testing::read_file;
using preguss::testing::source_path;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int rc = -1;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("preguss_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Proc cli(const std::string& args) {
  static int n = 0;
  fs::path errf = fs::temp_directory_path() / ("preguss_cli_err_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
  std::string cmd = std::string(PREGUSS_CLI) + " " + args + " 2>" + errf.string();
  Proc p;
  FILE* f = ::popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  for (std::size_t k; (k = std::fread(buf, 1, sizeof buf, f)) > 0;) p.out.append(buf, k);
  int st = ::pclose(f);
  p.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  p.err = read_file(errf.string());
  fs::remove(errf);
  return p;
}

std::string ex(const std::string& name) { return source_path("examples_mc/" + name); }

}  // namespace

TEST(Cli, AnalyzeExitCodes) {
  EXPECT_EQ(cli("analyze " + ex("abs.mc")).rc, 1);
  EXPECT_EQ(cli("analyze " + ex("safe.mc")).rc, 0);
  EXPECT_EQ(cli("analyze " + ex("loop.mc")).rc, 0);
  EXPECT_EQ(cli("analyze " + ex("mutual.mc")).rc, 2);
  EXPECT_EQ(cli("analyze /nonexistent/x.mc").rc, 2);
}

TEST(Cli, RunExitCodes) {
  Proc a = cli("run " + ex("abs.mc"));
  EXPECT_EQ(a.rc, 1);
  EXPECT_NE(a.err.find("DefinitiveRTE call@17"), std::string::npos) << a.err;
  EXPECT_EQ(cli("run " + ex("id.mc")).rc, 0);
  EXPECT_EQ(cli("run " + ex("safe.mc")).rc, 0);
  Proc m = cli("run " + ex("mutual.mc"));
  EXPECT_EQ(m.rc, 2);
  EXPECT_FALSE(m.err.empty());
}

TEST(Cli, BadFlags) {
  EXPECT_EQ(cli("run --width 12 " + ex("abs.mc")).rc, 2);
  EXPECT_EQ(cli("run --generator magic " + ex("abs.mc")).rc, 2);
  EXPECT_EQ(cli("run --max-iters 0 " + ex("abs.mc")).rc, 2);
  EXPECT_EQ(cli("run").rc, 2);
  EXPECT_EQ(cli("frobnicate " + ex("abs.mc")).rc, 2);
  Proc h = cli("--help");
  EXPECT_EQ(h.rc, 0);
  EXPECT_NE(h.out.find("export-smt"), std::string::npos);
}

TEST(Cli, AnalyzePrintsInstrumentedSource) {
  Proc p = cli("analyze " + ex("abs.mc"));
  EXPECT_NE(p.out.find("assert"), std::string::npos);
  EXPECT_NE(p.out.find("-2147483647 <= x"), std::string::npos);
  Proc w8 = cli("analyze --width 8 " + ex("abs.mc"));
  EXPECT_NE(w8.out.find("-127 <= x"), std::string::npos) << w8.out;
}

TEST(Cli, RunPrintsAnnotatedSource) {
  Proc p = cli("run " + ex("id.mc"));
  EXPECT_NE(p.out.find("ensures \\result == x;"), std::string::npos) << p.out;
  EXPECT_EQ(p.out.find("requires"), std::string::npos);
}

TEST(Cli, ReportFlag) {
  fs::path d = scratch("report");
  fs::path r = d / "abs.json";
  EXPECT_EQ(cli("run --report " + r.string() + " " + ex("abs.mc")).rc, 1);
  auto j = nlohmann::ordered_json::parse(read_file(r.string()));
  EXPECT_EQ(preguss::validate_report(j), "");
  EXPECT_EQ(j["config"]["width"], 32);
}

TEST(Cli, FlagsReachTheReport) {
  fs::path d = scratch("flags");
  fs::path r = d / "r.json";
  cli("run --width 16 --max-iters 2 --continue-on-alert --no-dependency-filter --save-transcripts --report " +
      r.string() + " " + ex("id.mc"));
  auto j = nlohmann::ordered_json::parse(read_file(r.string()));
  EXPECT_EQ(j["config"]["width"], 16);
  EXPECT_EQ(j["config"]["max_iters"], 2);
  EXPECT_EQ(j["config"]["continue_on_alert"], true);
  EXPECT_EQ(j["config"]["dependency_filter"], false);
  EXPECT_EQ(j["config"]["save_transcripts"], true);
  for (const auto& t : j["transcripts"]) EXPECT_TRUE(t.contains("request"));
  // without the filter the callee stays in the slice
  bool kept = false;
  for (const auto& u : j["queue"])
    if (u["id"] == "div0@8" || u["kind"] == "DivByZero")
      for (const auto& s : u["slice"]) kept |= s == "id";
  EXPECT_TRUE(kept);
}

TEST(Cli, DumpQueue) {
  Proc p = cli("analyze --dump-queue " + ex("abs.mc"));
  ASSERT_FALSE(p.out.empty());
  EXPECT_EQ(p.out.front(), '[');
  std::size_t end = p.out.find("\n]\n");
  ASSERT_NE(end, std::string::npos);
  auto q = nlohmann::json::parse(p.out.substr(0, end + 2));
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0]["id"], "overflow@7");
  EXPECT_EQ(q[1]["id"], "call@14");
}

TEST(Cli, ContinueOnAlertChangesStop) {
  fs::path d = scratch("alert");
  // at width 8 the loop bound 10 is fine, so build a program the oracle cannot certify
  fs::path src = d / "hard.mc";
  {
    std::ofstream f(src);
    f << "int sq(int x) { return x * x; }\nvoid main() { int a = sq(3); int b = sq(4); }\n";
  }
  fs::path r1 = d / "1.json", r2 = d / "2.json";
  cli("run --width 8 --max-iters 1 --report " + r1.string() + " " + src.string());
  cli("run --width 8 --max-iters 1 --continue-on-alert --report " + r2.string() + " " + src.string());
  auto a = nlohmann::json::parse(read_file(r1.string()));
  auto b = nlohmann::json::parse(read_file(r2.string()));
  EXPECT_LE(a["summary"]["processed"].get<int>(), b["summary"]["processed"].get<int>());
  if (a["summary"]["high_risk"].get<int>() > 0) {
    EXPECT_TRUE(a["summary"]["stopped_early"].get<bool>());
    EXPECT_FALSE(b["summary"]["stopped_early"].get<bool>());
  }
}

TEST(Cli, AnnotatedFlag) {
  fs::path d = scratch("ann");
  fs::path out = d / "id.annotated.mc";
  Proc p = cli("run --annotated " + out.string() + " " + ex("id.mc"));
  EXPECT_EQ(p.rc, 0);
  EXPECT_EQ(p.out, "");
  EXPECT_NE(read_file(out.string()).find("ensures"), std::string::npos);
}

TEST(Cli, ExportSmt) {
  fs::path d = scratch("smt");
  Proc p = cli("export-smt --id overflow@7 --id call@17 --out-dir " + d.string() + " " + ex("abs.mc"));
  EXPECT_EQ(p.rc, 0) << p.err;
  ASSERT_TRUE(fs::exists(d / "overflow@7.smt2"));
  ASSERT_TRUE(fs::exists(d / "call@17.smt2"));
  std::string s = read_file((d / "overflow@7.smt2").string());
  EXPECT_NE(s.find("(set-logic"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_NE(s.find("(<= |x| 2147483647)"), std::string::npos);  // range axiom at width 32
  EXPECT_EQ(cli("export-smt --id nosuch@1 --out-dir " + d.string() + " " + ex("abs.mc")).rc, 2);
  EXPECT_EQ(cli("export-smt --out-dir " + d.string() + " " + ex("abs.mc")).rc, 0);
}

TEST(Cli, SeveralInputsTakeTheWorstCode) {
  EXPECT_EQ(cli("analyze " + ex("safe.mc") + " " + ex("abs.mc")).rc, 1);
  EXPECT_EQ(cli("analyze " + ex("safe.mc") + " " + ex("mutual.mc")).rc, 2);
}

TEST(Cli, LlmWithoutEndpointExitsTwo) {
  Proc p = cli("run --generator llm " + ex("abs.mc"));
  EXPECT_EQ(p.rc, 2);
  EXPECT_NE(p.err.find("generator unavailable"), std::string::npos);
}
