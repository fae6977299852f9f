#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "pbo/corpus.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Res {
  int code = -1;
  std::string out;
  json j;
};

// Run the CLI with a shell-quoted argument string; stderr is discarded.
Res cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(PBO_CLI) + "' " + args + " 2>/dev/null";
  Res r;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.j = json::parse(r.out, nullptr, false);
  return r;
}

std::string corpus_file(const std::string& stem) { return (fs::path(pbo::default_corpus_dir()) / (stem + ".pbo")).string(); }

fs::path scratch(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("pbo_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("check: exit codes and diagnostics", "[cli]") {
  Res ok = cli("check '" + corpus_file("reduce_example") + "'");
  CHECK(ok.code == 0);
  REQUIRE(ok.j.is_object());
  CHECK(ok.j["ok"] == true);
  CHECK(ok.j["type"] == "Int");

  Res bad = cli("check '" + corpus_file("double_use") + "'");
  CHECK(bad.code == 1);
  REQUIRE(bad.j.is_object());
  CHECK(bad.j["ok"] == false);
  REQUIRE(bad.j["diagnostics"].size() == 1);
  CHECK(bad.j["diagnostics"][0]["code"] == "LinearUsedTwice");
  CHECK(bad.j["diagnostics"][0]["span"]["line"].get<int>() > 0);

  fs::path d = scratch("parse");
  write(d / "broken.pbo", "let x = in 1");
  Res perr = cli("check '" + (d / "broken.pbo").string() + "'");
  CHECK(perr.code == 2);
  CHECK(perr.j["diagnostics"][0]["code"] == "Syntax");
  CHECK(cli("check '" + (d / "missing.pbo").string() + "'").code == 2);
  CHECK(cli("frobnicate").code == 2);
  fs::remove_all(d);
}

TEST_CASE("run: outcome JSON", "[cli]") {
  for (const char* sem : {"mut", "den"}) {
    Res r = cli("run '" + corpus_file("reduce_example") + "' --semantics " + sem + " --seed 3");
    CHECK(r.code == 0);
    REQUIRE(r.j.is_object());
    CHECK(r.j["semantics"] == sem);
    CHECK(r.j["outcome"]["kind"] == "ReturnedInt");
    CHECK(r.j["outcome"]["value"] == 7);
  }
  Res bh = cli("run '" + corpus_file("blackhole") + "' --scheduler first");
  CHECK(bh.code == 0);
  CHECK(bh.j["outcome"]["kind"] == "BlackHole");
  // type errors stop run unless --unsafe
  CHECK(cli("run '" + corpus_file("leak") + "'").code == 1);
  Res unsafe = cli("run '" + corpus_file("leak") + "' --unsafe");
  CHECK(unsafe.code == 0);
  CHECK(unsafe.j["outcome"]["kind"] == "NormalValue");
}

TEST_CASE("run: trace is one JSON object per step", "[cli]") {
  fs::path d = scratch("trace");
  fs::path t = d / "trace.jsonl";
  Res r = cli("run '" + corpus_file("reduce_example") + "' --semantics den --trace '" + t.string() + "'");
  CHECK(r.code == 0);
  std::ifstream in(t);
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    REQUIRE(j.is_object());
    CHECK(j["step_index"] == n);
    CHECK(j.contains("rule_id"));
    ++n;
  }
  CHECK(n == r.j["outcome"]["steps"].get<size_t>());
  fs::remove_all(d);
}

TEST_CASE("metatheory commands", "[cli]") {
  Res u = cli("uniq '" + corpus_file("par_disjoint") + "' --schedules 20");
  CHECK(u.code == 0);
  CHECK(u.j["verdict"] == "PASS");
  CHECK(u.j["values"] == json::array({38}));

  Res c = cli("confluence '" + corpus_file("reduce_example") + "' --depth 20");
  CHECK(c.code == 0);
  CHECK(c.j["verdict"] == "PASS");
  CHECK(c.j["stats"]["nodes"].get<size_t>() > 1);

  Res l = cli("leak '" + corpus_file("leak") + "' --unsafe --schedules 5");
  CHECK(l.code == 1);
  CHECK(l.j["verdict"] == "FAIL");

  Res g = cli("graph '" + corpus_file("reduce_example") + "' --depth 5");
  CHECK(g.code == 0);
  CHECK(g.j["nodes"].is_number());

  Res capped = cli("graph '" + corpus_file("par_disjoint") + "' --depth 20", "PBO_NODE_CAP=5");
  CHECK(capped.code == 1);
  CHECK(capped.j["error"] == "ExplosionAbort");
  Res capped2 = cli("confluence '" + corpus_file("par_disjoint") + "'", "PBO_NODE_CAP=5");
  CHECK(capped2.code == 1);
  CHECK(capped2.j["verdict"] == "ABORTED");
}

TEST_CASE("corpus command", "[cli]") {
  fs::path d = scratch("corpus");
  fs::copy_file(corpus_file("reduce_example"), d / "reduce_example.pbo");
  fs::copy_file(corpus_file("double_use"), d / "double_use.pbo");
  Res good = cli("corpus --dir '" + d.string() + "' --schedules 5");
  CHECK(good.code == 0);
  CHECK(good.j["failed"] == 0);
  CHECK(good.j["passed"].get<int>() > 0);

  // one corrupted expectation yields exactly one failure
  std::ifstream in(d / "reduce_example.pbo");
  std::string src((std::istreambuf_iterator<char>(in)), {});
  in.close();
  src.replace(src.find("--! leak: none"), 14, "--! leak: 1");
  write(d / "reduce_example.pbo", src);
  Res bad = cli("corpus --dir '" + d.string() + "' --schedules 5");
  CHECK(bad.code == 1);
  CHECK(bad.j["failed"] == 1);
  size_t fails = 0;
  for (auto& row : bad.j["results"])
    if (row["verdict"] == "FAIL") {
      ++fails;
      CHECK(row["entry"] == "reduce_example");
      CHECK(row["check"] == "leak");
    }
  CHECK(fails == 1);

  // only the negative suite: the corrupted positive entry is not looked at
  Res neg = cli("corpus --dir '" + d.string() + "' --suite negative");
  CHECK(neg.code == 0);
  CHECK(neg.j["failed"] == 0);
  // an empty directory passes vacuously
  fs::path empty = scratch("empty");
  Res none = cli("corpus --dir '" + empty.string() + "'");
  CHECK(none.code == 0);
  CHECK(none.j["results"].empty());
  fs::remove_all(d);
  fs::remove_all(empty);
}
