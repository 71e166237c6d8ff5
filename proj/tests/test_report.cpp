#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "paths.hpp"
#include "preguss/report.hpp"

using namespace preguss;
using preguss::testing::read_file;
using preguss::testing::source_path;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("preguss_report_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig cfg_for(const std::string& example, const fs::path& report) {
  RunConfig c;
  c.inputs = {source_path("examples_mc/" + example)};
  c.report = report.string();
  return c;
}

json run_and_load(const RunConfig& c, int expect_rc) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(c, out, err), expect_rc) << err.str();
  return json::parse(read_file(c.report));
}

}  // namespace

TEST(Report, RunReportValidates) {
  fs::path d = scratch("run");
  for (const char* ex : {"abs.mc", "id.mc", "loop.mc", "safe.mc"}) {
    RunConfig c = cfg_for(ex, d / (std::string(ex) + ".json"));
    std::ostringstream out, err;
    cmd_run(c, out, err);
    json r = json::parse(read_file(c.report));
    EXPECT_EQ(validate_report(r), "") << ex;
    EXPECT_EQ(r["schema_version"], "1.0");
    EXPECT_EQ(r["command"], "run");
  }
}

TEST(Report, AnalyzeReportValidates) {
  fs::path d = scratch("analyze");
  RunConfig c = cfg_for("abs.mc", d / "abs.json");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_analyze(c, out, err), 1);
  json r = json::parse(read_file(c.report));
  EXPECT_EQ(validate_report(r), "");
  EXPECT_EQ(r["command"], "analyze");
  EXPECT_FALSE(r.contains("verdicts"));
  EXPECT_EQ(r["analysis"]["counts"]["SignedOverflow"]["Alarm"], 1);
  EXPECT_EQ(r["analysis"]["counts"]["CallSitePrecondition"]["Pending"], 2);
}

TEST(Report, AbsContents) {
  fs::path d = scratch("abs");
  json r = run_and_load(cfg_for("abs.mc", d / "r.json"), 1);
  ASSERT_EQ(r["verdicts"].size(), 3u);
  EXPECT_EQ(r["verdicts"][0]["id"], "overflow@7");
  EXPECT_EQ(r["verdicts"][0]["verdict"], "Certified");
  EXPECT_EQ(r["verdicts"][2]["verdict"], "DefinitiveRTE");
  EXPECT_EQ(r["verdicts"][2]["requires_from"], json::array({"overflow@7"}));
  EXPECT_EQ(r["contracts"][0]["function"], "abs");
  EXPECT_EQ(r["contracts"][0]["requires"].size(), 1u);
  EXPECT_EQ(r["summary"]["certified"], 2);
  EXPECT_EQ(r["summary"]["definitive_rte"], 1);
  EXPECT_EQ(r["summary"]["prohibition_violations"], 0);
  // digest is FNV-1a 64 of the raw source bytes
  EXPECT_EQ(r["program"]["digest"], "fnv1a64:" + fnv1a_hex(read_file(source_path("examples_mc/abs.mc"))));
}

TEST(Report, TranscriptsOnlyWhenAsked) {
  fs::path d = scratch("tr");
  RunConfig c = cfg_for("id.mc", d / "a.json");
  json plain = run_and_load(c, 0);
  c.save_transcripts = true;
  c.report = (d / "b.json").string();
  json full = run_and_load(c, 0);
  ASSERT_FALSE(plain["transcripts"].empty());
  for (const auto& t : plain["transcripts"]) {
    EXPECT_FALSE(t.contains("request"));
    EXPECT_EQ(t["request_digest"].get<std::string>().size(), 16u);
  }
  for (const auto& t : full["transcripts"]) {
    ASSERT_TRUE(t.contains("request"));
    EXPECT_EQ(fnv1a_hex(t["request"].get<std::string>()), t["request_digest"]);
  }
  EXPECT_EQ(validate_report(full), "");
}

TEST(Report, DeterministicModuloTiming) {
  fs::path d = scratch("det");
  for (const char* ex : {"abs.mc", "id.mc", "loop.mc"}) {
    RunConfig c = cfg_for(ex, d / "1.json");
    std::ostringstream o1, e1, o2, e2;
    cmd_run(c, o1, e1);
    json a = json::parse(read_file(c.report));
    c.report = (d / "2.json").string();
    cmd_run(c, o2, e2);
    json b = json::parse(read_file(c.report));
    EXPECT_EQ(without_timing(a).dump(), without_timing(b).dump()) << ex;
    EXPECT_FALSE(without_timing(a).contains("timing"));
    EXPECT_EQ(o1.str(), o2.str());
  }
}

TEST(Report, SchemaRejectsBadDocuments) {
  fs::path d = scratch("bad");
  json good = run_and_load(cfg_for("id.mc", d / "r.json"), 0);
  ASSERT_EQ(validate_report(good), "");

  json extra = good;
  extra["surprise"] = 1;
  EXPECT_NE(validate_report(extra), "");

  json missing = good;
  missing.erase("program");
  EXPECT_NE(validate_report(missing), "");

  json wrong_verdict = good;
  wrong_verdict["verdicts"][0]["verdict"] = "Maybe";
  EXPECT_NE(validate_report(wrong_verdict), "");

  json bad_digest = good;
  bad_digest["program"]["digest"] = "md5:abc";
  EXPECT_NE(validate_report(bad_digest), "");

  json bad_version = good;
  bad_version["schema_version"] = "2.0";
  EXPECT_NE(validate_report(bad_version), "");

  EXPECT_NE(validate_report(without_timing(good)), "");
}

TEST(Report, ShippedSchemaIsCompiledIn) {
  EXPECT_EQ(json::parse(report_schema()), json::parse(read_file(source_path("docs/report.schema.json"))));
}

TEST(Report, SeveralInputsWriteADirectory) {
  fs::path d = scratch("multi");
  RunConfig c;
  c.inputs = {source_path("examples_mc/safe.mc"), source_path("examples_mc/loop.mc")};
  c.report = (d / "out").string();
  c.annotated = (d / "ann").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(c, out, err), 0) << err.str();
  EXPECT_TRUE(fs::exists(d / "out" / "safe.report.json"));
  EXPECT_TRUE(fs::exists(d / "out" / "loop.report.json"));
  EXPECT_TRUE(fs::exists(d / "ann" / "loop.mc"));
  EXPECT_EQ(out.str(), "");
}

TEST(Report, DumpQueueComesFirst) {
  RunConfig c;
  c.inputs = {source_path("examples_mc/abs.mc")};
  c.dump_queue = true;
  std::ostringstream out, err;
  cmd_analyze(c, out, err);
  std::string s = out.str();
  ASSERT_EQ(s.front(), '[');
  std::size_t end = s.find("\n]\n");
  ASSERT_NE(end, std::string::npos);
  json q = json::parse(s.substr(0, end + 2));
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0]["id"], "overflow@7");
  EXPECT_NE(s.find("assert", end), std::string::npos);
}

TEST(Report, QueuedAssertionsSkipProven) {
  TypedProgram tp = load(preguss::testing::example("safe.mc"));
  CallGraph cg = build_call_graph(tp);
  AnalysisResult ar = analyze(tp);
  for (const auto& a : queued_assertions(ar, cg, tp)) EXPECT_NE(a.status, AssertionStatus::Proven) << a.id;
}

TEST(Report, InstrumentedSourceCarriesAlarms) {
  TypedProgram tp = load(preguss::testing::example("abs.mc"));
  AnalysisResult ar = analyze(tp);
  std::string s = instrumented_source(tp, ar);
  EXPECT_NE(s.find("-2147483647 <= x"), std::string::npos);
  std::size_t n = 0;
  for (std::size_t p = s.find("assert"); p != std::string::npos; p = s.find("assert", p + 1)) ++n;
  EXPECT_EQ(n, 1u);
}
