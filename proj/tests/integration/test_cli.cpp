// Copyright 2026 The opfx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = OPFX_CLI_PATH;
const std::string kCase3 = std::string(OPFX_DATA_DIR) + "/pglib_opf_case3_lmbd.m";
const std::string kCase5 = std::string(OPFX_DATA_DIR) + "/pglib_opf_case5_pjm.m";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("opfx-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  const fs::path d = scratch("usage");
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("collect --n 3") == 2);
  CHECK(run("collect --case " + kCase3 + " --objective nope --out " + d.string()) == 2);
  CHECK(run("collect --case " + kCase3 + " --n 0 --out " + d.string()) == 2);
  CHECK(run("exhaust --case " + kCase5 + " --m 100 --cap 1000 --out " + d.string()) == 2);
  CHECK(run("--version") == 0);
}

TEST_CASE("I/O and parse errors exit 3") {
  const fs::path d = scratch("io");
  CHECK(run("collect --case /nonexistent.m --out " + d.string()) == 3);
  std::ofstream(d / "bad.m") << "mpc.bus = [ 1 2 x ];\n";
  CHECK(run("network " + (d / "bad.m").string()) == 3);
}

TEST_CASE("infeasible seed exits 1") {
  const fs::path d = scratch("infeasible");
  std::ofstream(d / "over.m") << R"(mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1.0 0 230 1 1.1 0.9;
  2 1 900 10 0 0 1 1.0 0 230 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 100 -100 1.0 100 1 100 0;
];
mpc.branch = [
  1 2 0.01 0.1 0.0 0 0 0 0 0 1 -30 30;
];
)";
  CHECK(run("collect --case " + (d / "over.m").string() + " --n 3 --out " + d.string()) == 1);
}

TEST_CASE("collect, exhaust, compare, score, replay") {
  const fs::path d = scratch("pipeline");
  const std::string out = " --out " + d.string();
  REQUIRE(run("collect --case " + kCase3 + " --objective f36 --n 12" + out) == 0);
  REQUIRE(run("collect --case " + kCase3 + " --objective f03 --n 8" + out) == 0);
  CHECK(lines(d / "f36.library.jsonl") == 13);
  CHECK(lines(d / "f36.library.csv") == 13);

  REQUIRE(run("exhaust --case " + kCase3 + " --m 3 --t 2" + out) == 0);
  CHECK(lines(d / "exhaustive.partitions.csv") == 1 + 27);

  REQUIRE(run("compare --library " + (d / "f36.library.jsonl").string() + " --library " +
              (d / "f03.library.jsonl").string() + " --exhaustive " +
              (d / "exhaustive.set.jsonl").string() + " --norms PQ,PV" + out) == 0);
  CHECK(lines(d / "compare.distances.csv") == 1 + 4);
  std::size_t curves = 0;
  for (const auto& e : fs::directory_iterator(d)) {
    curves += e.path().string().find(".progression.csv") != std::string::npos;
  }
  CHECK(curves == 4);
  CHECK(lines(d / "compare.1-f36.PQ.progression.csv") == 1 + 12);

  REQUIRE(run("score --table " + (d / "compare.distances.csv").string() + out) == 0);
  CHECK(slurp(d / "score.scores.csv").rfind("Func,PQ score,Func,PV score,Func,Overall\n", 0) == 0);

  const fs::path r = d / "replay";
  for (const std::string m : {"f36", "exhaustive", "compare", "score"}) {
    REQUIRE(run("replay " + (d / (m + ".manifest.json")).string() + " --out " + r.string()) == 0);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(r)) {
    if (e.path().extension() == ".json") continue;
    CHECK(slurp(e.path()) == slurp(d / e.path().filename()));
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("identical libraries give identical rows; t = 0 gives an empty set") {
  const fs::path d = scratch("same");
  const std::string out = " --out " + d.string();
  REQUIRE(run("collect --case " + kCase3 + " --n 4" + out) == 0);
  REQUIRE(run("exhaust --case " + kCase3 + " --m 2 --t 0 --name empty" + out) == 0);
  CHECK(lines(d / "empty.set.jsonl") == 1 + 8);
  REQUIRE(run("exhaust --case " + kCase3 + " --m 1 --t 3" + out) == 0);
  const std::string lib = (d / "f36.library.jsonl").string();
  REQUIRE(run("compare --library " + lib + " --library " + lib + " --exhaustive " +
              (d / "exhaustive.set.jsonl").string() + " --norms PQ" + out) == 0);
  std::istringstream in(slurp(d / "compare.distances.csv"));
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(a == b);
}

TEST_CASE("mismatched networks exit 3") {
  const fs::path d = scratch("mismatch");
  const std::string out = " --out " + d.string();
  REQUIRE(run("collect --case " + kCase3 + " --n 2" + out) == 0);
  REQUIRE(run("exhaust --case " + kCase5 + " --m 1 --t 1" + out) == 0);
  CHECK(run("compare --library " + (d / "f36.library.jsonl").string() + " --exhaustive " +
            (d / "exhaustive.set.jsonl").string() + out) == 3);
}

TEST_CASE("catalog and network listings") {
  CHECK(run("catalog") == 0);
  CHECK(run("catalog --json") == 0);
  CHECK(run("network " + kCase5) == 0);
  CHECK(run("network --json " + kCase5) == 0);
}
