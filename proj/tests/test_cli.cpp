#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "permutex/diagrams.hpp"
#include "permutex/io.hpp"

using namespace permutex;
namespace fs = std::filesystem;
using json   = nlohmann::json;

namespace {
  std::string const fixtures = PERMUTEX_FIXTURES;
  std::string const binary   = PERMUTEX_BINARY;

  struct Run {
    int         code = -1;
    std::string out;

    // The machine block: the line after "@report ", or the whole output
    // in quiet mode.
    json report() const {
      auto at = out.rfind("@report ");
      if (at == std::string::npos) {
        return json::parse(out);
      }
      auto end = out.find('\n', at);
      return json::parse(out.substr(at + 8, end - at - 8));
    }
    bool says(std::string const& text) const {
      return out.find(text) != std::string::npos;
    }
  };

  fs::path scratch() {
    auto dir = fs::temp_directory_path() / ("permutex_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
  }

  struct Cleanup {
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(scratch(), ec);
    }
  } const cleanup;

  Run run(std::string const& args, std::string const& env = "") {
    std::string cmd = "cd '" + scratch().string() + "' && " + env + " '" + binary + "' " + args + " 2>&1";
    Run         r;
    FILE*       pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) {
      r.out.append(buf, n);
    }
    int status = pclose(pipe);
    r.code     = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  std::string alg(std::string const& name) {
    return "'" + fixtures + "/algebras/" + name + ".alg'";
  }
  std::string diag(std::string const& name) {
    return "'" + fixtures + "/diagrams/" + name + ".diag'";
  }
  std::string deriv(std::string const& name) {
    return "'" + fixtures + "/derivations/" + name + ".deriv'";
  }
}  // namespace

TEST_CASE("classify") {
  auto z4 = run("classify " + alg("z4"));
  CHECK(z4.code == 0);
  CHECK(z4.says("two_permutable; maltsev term found"));
  CHECK(z4.report()["class"] == "two_permutable");

  auto c3 = run("classify " + alg("chain3_semilattice"));
  CHECK(c3.code == 0);
  CHECK(c3.says("three_permutable_not_two; no maltsev term"));

  auto c4 = run("classify " + alg("chain4_semilattice"));
  CHECK(c4.code == 0);
  CHECK(c4.says("not_three_permutable"));
  CHECK_FALSE(c4.report()["witness"].is_null());

  auto tiny = run("classify --budget 1 " + alg("s3"));
  CHECK(tiny.code == 0);
  CHECK(tiny.report()["maltsev_term"] == "unknown");
}

TEST_CASE("congruences and terms") {
  auto r = run("-q congruences " + alg("chain3_semilattice"));
  CHECK(r.code == 0);
  CHECK(r.report()["count"] == 4);
  auto p = run("-q congruences --strategy partitions " + alg("s3"));
  CHECK(p.report()["count"] == 3);
  CHECK(run("congruences --strategy nope " + alg("s3")).code == 2);

  CHECK(run("-q maltsev-term " + alg("z2")).report()["result"] == "found");
  auto none = run("-q maltsev-term " + alg("chain3_semilattice"));
  CHECK(none.code == 0);
  CHECK(none.report()["result"] == "none");
}

TEST_CASE("check") {
  auto bad = run("check " + diag("counterexample_square") + " --property regular-pushout");
  CHECK(bad.code == 1);
  CHECK(bad.report()["holds"] == false);
  CHECK(run("check " + diag("pullback_square")).code == 0);
  CHECK(run("check " + diag("group_square")).code == 0);
  CHECK(run("check " + diag("group_cuboid") + " --property cuboid").code == 0);
  CHECK(run("check " + diag("counterexample_cuboid")).code == 1);
  CHECK(run("check " + diag("group_cube")).code == 0);
  CHECK(run("check " + diag("counterexample_cube") + " --property cube").code == 1);
  // A square is not a cuboid.
  CHECK(run("check " + diag("pullback_square") + " --property cuboid").code == 2);
  CHECK(run("check " + diag("pullback_square") + " --property hexagon").code == 2);
  CHECK(run("check " + diag("absent")).code == 2);
}

TEST_CASE("parse errors report a position") {
  auto file = scratch() / "broken.diag";
  std::ofstream(file) << "{\n  \"shape\": \"square\",\n  oops\n}\n";
  auto r = run("check '" + file.string() + "'");
  CHECK(r.code == 2);
  CHECK(r.says("line 3"));
}

TEST_CASE("sweep") {
  auto dir = scratch();
  fs::remove(dir / "counterexample.diag");
  auto set3 = run("sweep --backend set --shape square --max-carrier 3");
  CHECK(set3.code == 1);
  CHECK(set3.report()["verdict"] == "counterexample_found");
  REQUIRE(fs::exists(dir / "counterexample.diag"));
  // The written file re-checks to the same verdict.
  CHECK(run("check counterexample.diag").code == 1);
  auto reread = square_from(load_diagram(dir / "counterexample.diag"));
  CHECK_FALSE(is_regular_pushout(reread));

  auto set1 = run("sweep --backend set --shape square --max-carrier 1");
  CHECK(set1.code == 0);
  CHECK(set1.report()["cases_checked"] == 1);

  auto z4 = run("-q sweep --backend algebra " + alg("z4") + " --shape cuboid");
  CHECK(z4.code == 0);
  CHECK(z4.report()["verdict"] == "all_conform");

  auto random = run("-q sweep --backend set --shape square --mode random --seed 3 --cases 500 --all --out r.diag");
  CHECK(random.code == 1);
  CHECK(random.report()["cases_checked"] == 500);
  CHECK(fs::exists(dir / "r.diag"));

  CHECK(run("sweep --backend set --shape square --max-carrier 0").code == 2);
  CHECK(run("sweep --backend set --shape cube --max-carrier 5").code == 2);
  CHECK(run("sweep --backend algebra --shape square").code == 2);
  CHECK(run("sweep --backend set --shape blob").code == 2);
}

TEST_CASE("sweep reports are byte-identical across runs and thread counts") {
  std::string const args = "-q sweep --backend set --shape cube --max-carrier 3 --all --out x.diag";
  auto              one  = run(args, "PERMUTEX_THREADS=1");
  auto              many = run(args, "PERMUTEX_THREADS=6");
  CHECK(one.code == 1);
  CHECK(one.out == many.out);
  CHECK(one.out == run(args).out);
}

TEST_CASE("replay") {
  auto ok = run("replay " + deriv("prop_maltsev_po") + " --env " + diag("group_square"));
  CHECK(ok.code == 0);
  CHECK(ok.report()["verdict"] == true);

  auto bad = run("replay " + deriv("prop_maltsev_po") + " --env " + diag("counterexample_square"));
  CHECK(bad.code == 1);
  CHECK(bad.report()["first_failure"] == 4);
  CHECK(bad.says("R_g R_c = R_c R_g"));

  CHECK(run("replay " + deriv("upper_cuboid") + " --env " + diag("group_cube")).code == 0);

  auto single = scratch() / "one.deriv";
  std::ofstream(single) << "comp(d, op(f))\n";
  CHECK(run("replay '" + single.string() + "' --env " + diag("group_square")).code == 2);
  auto unknown = scratch() / "unknown.deriv";
  std::ofstream(unknown) << "comp(d, op(f))\ncomp(q, op(f))\n";
  CHECK(run("replay '" + unknown.string() + "' --env " + diag("group_square")).code == 2);
  CHECK(run("replay " + deriv("prop_maltsev_po")).code == 2);
}

TEST_CASE("emit-dot") {
  auto sq = run("emit-dot " + diag("pullback_square"));
  CHECK(sq.code == 0);
  auto nodes = [](std::string const& dot) {
    std::size_t n = 0;
    for (auto pos = dot.find(" (", 0); pos != std::string::npos; pos = dot.find(" (", pos + 1)) {
      ++n;
    }
    return n;
  };
  auto edges = [](std::string const& dot) {
    std::size_t n = 0;
    for (auto pos = dot.find("->", 0); pos != std::string::npos; pos = dot.find("->", pos + 1)) {
      ++n;
    }
    return n;
  };
  CHECK(nodes(sq.out) == 4);
  CHECK(edges(sq.out) == 6);
  CHECK(nodes(run("emit-dot " + diag("group_cube")).out) == 8);
  CHECK(run("emit-dot " + diag("pullback_square")).out == sq.out);

  auto report = scratch() / "check.json";
  auto check  = run("-q check " + diag("counterexample_square"));
  std::ofstream(report) << check.out;
  auto lit = run("emit-dot " + diag("counterexample_square") + " --report '" + report.string() + "'");
  CHECK(lit.code == 0);
  CHECK(lit.says("penwidth=2"));
  CHECK(run("emit-dot " + diag("absent")).code == 2);
}

TEST_CASE("quiet output is one JSON document") {
  for (auto const& args : {"-q classify " + alg("v4"), "-q check " + diag("group_square"),
                           "-q replay " + deriv("prop_maltsev_po") + " --env " + diag("group_square")}) {
    CAPTURE(args);
    auto r = run(args);
    CHECK(json::accept(r.out));
    CHECK_FALSE(r.says("@report"));
  }
}
