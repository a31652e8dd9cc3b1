#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "matchpoa/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("matchpoa_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

TempDir& tmp() {
  static TempDir dir;
  return dir;
}

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path capture = tmp().path / ("capture_" + std::to_string(counter++) + ".txt");
  std::string cmd =
      std::string(MATCHPOA_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  int code = -1;
  if (rc != -1 && WIFEXITED(rc)) code = WEXITSTATUS(rc);
  return {code, matchpoa::read_file(capture.string())};
}

std::string fixture(const std::string& name, const std::string& content) {
  fs::path p = tmp().path / name;
  matchpoa::write_file(p.string(), content);
  return p.string();
}

const std::string kTwoAgents =
    R"({"n": 2, "normalization": "unit-sum", "valuations": [["3/4","1/4"],["2/3","1/3"]]})";
const std::string kThreeAgents =
    R"({"n": 3, "normalization": "unit-sum",)"
    R"( "valuations": [["3/5","3/10","1/10"],["3/5","3/10","1/10"],["1/10","3/10","3/5"]]})";

}  // namespace

TEST_CASE("run: eating matrix with exhaustion times") {
  auto inst = fixture("three.json", kThreeAgents);
  auto res = run_cli("run --mechanism ps --instance " + inst);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("agent,item_1,item_2,item_3\n") != std::string::npos);
  CHECK(res.out.find("1,1/2,1/2,0\n") != std::string::npos);
  CHECK(res.out.find("3,0,0,1\n") != std::string::npos);
  CHECK(res.out.find("times,1/2,1,1\n") != std::string::npos);
}

TEST_CASE("run: sampled priority records seed and trials and is reproducible") {
  auto inst = fixture("three2.json", kThreeAgents);
  auto a = run_cli("run --mechanism rp --trials 500 --seed 11 --instance " + inst);
  auto b = run_cli("run --mechanism rp --trials 500 --seed 11 --instance " + inst);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("seed") != std::string::npos);
  CHECK(a.out.find("500") != std::string::npos);
  auto c = run_cli("run --mechanism rp --trials 500 --seed 12 --instance " + inst);
  CHECK(c.out != a.out);
}

TEST_CASE("opt: welfare line present") {
  auto inst = fixture("three3.json", kThreeAgents);
  auto res = run_cli("opt --instance " + inst);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("welfare,3/2") != std::string::npos);  // 3/5 + 3/10 + 3/5
}

TEST_CASE("nash verify: equilibrium exits zero, deviation exits one with a witness") {
  auto inst = fixture("two.json", kTwoAgents);
  auto truthful = fixture("truthful.json", R"({"orders": [[1,2],[1,2]]})");
  auto twisted = fixture("twisted.json", R"({"orders": [[2,1],[1,2]]})");

  auto good = run_cli("nash verify --mechanism ps --instance " + inst + " --strategies " +
                      truthful);
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("profile_id,verified,max_gain,welfare,opt,ratio\n") != std::string::npos);
  CHECK(good.out.find("1,true,0,1,13/12,13/12\n") != std::string::npos);

  auto bad = run_cli("nash verify --mechanism ps --instance " + inst + " --strategies " + twisted);
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("1,false,1/4,11/12,13/12,13/11\n") != std::string::npos);
  CHECK(bad.out.find("# witness agent=1 strategy=(1,2) gain=1/4") != std::string::npos);

  // the relaxed check passes once the tolerance covers the witnessed gain
  auto eps = run_cli("nash verify --mechanism ps --epsilon 1/4 --instance " + inst +
                     " --strategies " + twisted);
  CHECK(eps.exit_code == 0);
}

TEST_CASE("nash enumerate: lists equilibria with both ratios") {
  auto inst = fixture("two2.json", kTwoAgents);
  auto res = run_cli("nash enumerate --mechanism ps --instance " + inst);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("1,true,0,1,13/12,13/12\n") != std::string::npos);
  CHECK(res.out.find("# poa = 13/12") != std::string::npos);
  CHECK(res.out.find("# pos = 13/12") != std::string::npos);
}

TEST_CASE("nash brd: converges on a small instance") {
  auto inst = fixture("two3.json", kTwoAgents);
  auto res = run_cli("nash brd --mechanism ps --instance " + inst + " --seed 5");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("# converged = true") != std::string::npos);
  CHECK(res.out.find("1,true,") != std::string::npos);
}

TEST_CASE("learn: regret table, welfare row, reproducible") {
  auto inst = fixture("two4.json", kTwoAgents);
  std::string args = "learn --mechanism ps --instance " + inst +
                     " --rounds 200 --seed 3 --learner rm --checkpoints 4";
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("agent,avg_regret,avg_regret_float\n") != std::string::npos);
  CHECK(a.out.find("welfare,") != std::string::npos);
  CHECK(a.out.find("round,max_avg_regret\n") != std::string::npos);
  CHECK(a.out.find("\n200,") != std::string::npos);
}

TEST_CASE("check ps-suite: four clean reports, reproducible") {
  std::string args = "check ps-suite --count 10 --seed 4";
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("check,instances,violations,seed\n") != std::string::npos);
  for (const char* check :
       {"quarter-time,", "equilibrium-floor,", "time-floor,", "truthful-dominance,"}) {
    CAPTURE(check);
    CHECK(a.out.find(std::string(check)) != std::string::npos);
  }
  CHECK(a.out.find(",0,4\n") != std::string::npos);  // zero violations, seed echoed
}

TEST_CASE("check envy: violations drive the exit code") {
  auto clean = run_cli("check envy --mechanism ps --n 3 --exhaustive");
  CHECK(clean.exit_code == 0);
  CHECK(clean.out.find("envy-free,216,0,0\n") != std::string::npos);

  auto dirty = run_cli("check envy --mechanism sd --n 3 --exhaustive");
  CHECK(dirty.exit_code == 1);
  CHECK(dirty.out.find("envy-free,216,288,0\n") != std::string::npos);
  CHECK(dirty.out.find("# violation [envy-free] instance 1:") != std::string::npos);
}

TEST_CASE("check safe: truthful passes, reversal fails with a witness") {
  auto safe =
      run_cli("check safe --mechanism ps --n 3 --agent 1 --strategy 1,2,3 --exhaustive");
  CHECK(safe.exit_code == 0);
  CHECK(safe.out.find("safe-strategy,36,0,0\n") != std::string::npos);

  auto unsafe = run_cli(
      "check safe --mechanism ps --n 3 --agent 1 --strategy 3,2,1 --true-order 1,2,3 "
      "--exhaustive");
  CHECK(unsafe.exit_code == 1);
  CHECK(unsafe.out.find("safe-strategy,36,35,0\n") != std::string::npos);
  CHECK(unsafe.out.find("fails against opponents") != std::string::npos);
}

TEST_CASE("construct: emitted JSON parses back to the generator output") {
  fs::path out = tmp().path / "thm6.json";
  auto res = run_cli("construct thm6 --n 4 --out " + out.string());
  CHECK(res.exit_code == 0);
  auto v = matchpoa::parse_instance(matchpoa::read_file(out.string()));
  CHECK(v.n == 4);
  CHECK(v.values[0][0] == matchpoa::Rat(1));
  CHECK(v.values[2][0] == matchpoa::Rat(1, 2));
}

TEST_CASE("audit: indicator-plus-uniform family at n=4 under eating") {
  auto res = run_cli("audit thm6 --mechanism ps --n 4");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("family,mechanism,n,k,conclusive,welfare,opt,ratio,predicted_bound,poa,pos\n") !=
        std::string::npos);
  CHECK(res.out.find("thm6-pos,ps,4,2,true,4/3,2,3/2,1,3/2,4/3\n") != std::string::npos);
}

TEST_CASE("sweep: identical-row family over two sizes") {
  auto res = run_cli("sweep thm5 --mechanism naive --nmin 4 --nmax 5");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("k,n,conclusive,welfare,opt,ratio,predicted_bound\n") != std::string::npos);
  CHECK(res.out.find("0,4,true,69/256,") != std::string::npos);
  CHECK(res.out.find("0,5,true,131/625,") != std::string::npos);
  CHECK(res.out.find("grid(D=8") != std::string::npos);
}

TEST_CASE("input errors exit with code two") {
  CHECK(run_cli("run --mechanism ps --instance does_not_exist.json").exit_code == 2);
  CHECK(run_cli("run --mechanism bogus --instance also_missing.json").exit_code == 2);
  auto inst = fixture("two5.json", kTwoAgents);
  CHECK(run_cli("nash verify --mechanism ps --instance " + inst).exit_code == 2);  // no strategies
  auto malformed = fixture("broken.json", "{not json");
  CHECK(run_cli("run --mechanism ps --instance " + malformed).exit_code == 2);
  // valuations failing their declared normalization are input errors too
  auto invalid = fixture(
      "badsum.json",
      R"({"n": 2, "normalization": "unit-sum", "valuations": [["1/2","1/3"],["1","0"]]})");
  CHECK(run_cli("run --mechanism ps --instance " + invalid).exit_code == 2);
}

TEST_CASE("help is not an error") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("nash --help").exit_code == 0);
}

TEST_CASE("out flag writes the same bytes as stdout capture") {
  auto inst = fixture("three4.json", kThreeAgents);
  fs::path out = tmp().path / "ps.csv";
  auto res = run_cli("run --mechanism ps --instance " + inst + " --out " + out.string());
  CHECK(res.exit_code == 0);
  auto file_copy = matchpoa::read_file(out.string());
  CHECK(file_copy.find("times,1/2,1,1\n") != std::string::npos);
}
