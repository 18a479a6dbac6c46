#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "qrw/syntax.hpp"

using namespace qrw;

#ifndef QREWRITE_BIN
#error "QREWRITE_BIN must name the qrewrite executable"
#endif

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs qrewrite through the shell; stderr is discarded unless merged.
Run run(const std::string& args, const std::string& stdin_text = "",
        bool merge_stderr = false) {
  const auto tmp = std::filesystem::temp_directory_path() / "qrewrite_cli_in.txt";
  {
    std::ofstream in(tmp);
    in << stdin_text;
  }
  const std::string cmd = std::string(QREWRITE_BIN) + " " + args + " < " +
                          tmp.string() + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tempFile(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST_CASE("check reports the sort or the error") {
  CHECK(run("check " + fixturePath("table1_row1.term")).out == "vector[a]\n");
  CHECK(run("check", "ip(V:x@a, V:y@b)").code == 1);
  CHECK(run("check", "").code == 2);
  CHECK(run("check", "plusV(").code == 2);
  CHECK(run("check /no/such/file").code == 2);
}

TEST_CASE("normalize") {
  const Run r = run("normalize " + fixturePath("teleport.term"));
  CHECK(r.code == 0);
  const Run paper = run("normalize " + fixturePath("teleport_final.term"));
  CHECK(r.out == paper.out);
  CHECK(run("normalize", "V:v@a").out == "V:v@a\n");
  CHECK(run("normalize", "V:v@a", true).out.find("steps: 0") != std::string::npos);
  CHECK(run("--max-steps 1 normalize " + fixturePath("teleport.term")).code == 3);
  CHECK(run("--format dirac normalize", "tensorV(V:y@b, V:x@a)").out ==
        "|x⟩_a ⊗ |y⟩_b\n");
}

TEST_CASE("the step budget can come from the environment") {
  const std::string cmd = "QREWRITE_MAX_STEPS=1 " + std::string(QREWRITE_BIN) +
                          " normalize " + fixturePath("teleport.term") +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
}

TEST_CASE("normalize dumps a derivation that replays") {
  const auto dump = (std::filesystem::temp_directory_path() / "qrw_dump.deriv").string();
  CHECK(run("normalize --dump-derivation " + dump + " " + fixturePath("teleport.term")).code == 0);
  CHECK(run("replay " + dump).code == 0);
}

TEST_CASE("replay") {
  const Run ok = run("replay " + fixturePath("table1.deriv"), "", true);
  CHECK(ok.code == 0);
  CHECK(ok.out.find("matches expect") != std::string::npos);

  std::string tampered = fixture("table1.deriv");
  tampered.replace(tampered.find("applyProjector fwd 2.1"), 22, "applyProjector fwd 2.2");
  const Run bad = run("replay " + tempFile("qrw_bad.deriv", tampered), "", true);
  CHECK(bad.code == 1);
  CHECK(bad.out.find("step 3") != std::string::npos);

  std::string no_expect = fixture("table1.deriv");
  no_expect.erase(no_expect.find("expect:"));
  const Run printed = run("replay " + tempFile("qrw_noexpect.deriv", no_expect));
  CHECK(printed.code == 0);
  CHECK(printed.out.find("timesV(timesS(1/sqrt2") == 0);

  CHECK(run("replay " + tempFile("qrw_garbage.deriv", "hello\n")).code == 2);
}

TEST_CASE("soundness") {
  const Run r = run("soundness --trials 10 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("41 of 41 rules sound") != std::string::npos);
  CHECK(run("soundness --trials 10 --seed 3").out == r.out);
  const Run mutated = run("soundness --trials 20 --mutate multiplyLeftIP");
  CHECK(mutated.code == 1);
  CHECK(mutated.out.find("multiplyLeftIP") != std::string::npos);
  CHECK(mutated.out.find("FAIL") != std::string::npos);
  const Run json = run("soundness --trials 5 --output json");
  CHECK(json.out.find("\"ruleId\"") != std::string::npos);
}

TEST_CASE("extra rule files") {
  const std::string rules = tempFile(
      "qrw_rules.txt", "rule user.x0: apply(O:x@$s, V:0@$s) -> V:1@$s\n");
  CHECK(run("--rules " + rules + " normalize", "apply(O:x@q, V:0@q)").out == "V:1@q\n");
}

TEST_CASE("repl retraces table 1") {
  std::string script = "load " + parseDerivation(fixture("table1.deriv")).initial + "\n";
  script += "moves\n";
  for (const char* s :
       {"multiplyRightApply fwd eps", "expandRightApply fwd 2", "multiplyRightApply fwd 2.2",
        "applyProjector fwd 2.1", "applyProjector fwd 2.2.2", "multiplyLeftV fwd 2.2",
        "expandLeftV rev 2", "multiplyLeftV fwd eps"}) {
    script += std::string("apply ") + s + "\n";
  }
  script += "show canonical\nundo\nundo\nbogus\nquit\n";
  const Run r = run("repl", script);
  CHECK(r.code == 0);
  CHECK(r.out.find("multiplyRightApply fwd eps") != std::string::npos);
  CHECK(r.out.find(parseDerivation(fixture("table1.deriv")).expect.value() + "\n") !=
        std::string::npos);
  CHECK(r.out.find("error: unknown command bogus") != std::string::npos);
}

TEST_CASE("rules lists the catalogue") {
  const Run r = run("rules");
  CHECK(r.code == 0);
  CHECK(r.out.find("41 rules") != std::string::npos);
  CHECK(r.out.find("ip.conjugateSymmetry [optional, disabled]") != std::string::npos);
}
