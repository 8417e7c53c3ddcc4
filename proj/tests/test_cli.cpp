#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADEX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("adex_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("gen then bench produces the documented CSV header") {
  TempDir tmp;
  const auto workload = (tmp.path / "w.json").string();
  const auto csv = (tmp.path / "t.csv").string();
  REQUIRE(run_cli("gen --n 30 --k 4 --auctions 10 --seed 7 --out " + workload) == 0);
  REQUIRE(run_cli("bench --workload " + workload + " --methods H,RH --out " + csv) == 0);

  const std::string text = slurp(csv);
  CHECK(text.rfind("auction,method,micros,total,n,k,seed,pipeline_micros,threads\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);  // header + 2 methods x 10 auctions
}

TEST_CASE("gen is reproducible byte for byte") {
  TempDir tmp;
  const auto a = (tmp.path / "a.json").string();
  const auto b = (tmp.path / "b.json").string();
  REQUIRE(run_cli("gen --n 12 --k 3 --auctions 5 --seed 11 --out " + a) == 0);
  REQUIRE(run_cli("gen --n 12 --k 3 --auctions 5 --seed 11 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("run emits a deterministic settlement trace") {
  TempDir tmp;
  const auto workload = (tmp.path / "w.json").string();
  const auto t1 = (tmp.path / "t1.jsonl").string();
  const auto t2 = (tmp.path / "t2.jsonl").string();
  REQUIRE(run_cli("gen --n 20 --k 3 --auctions 15 --seed 3 --out " + workload) == 0);
  REQUIRE(run_cli("run --workload " + workload + " --method RH --pricing gsp --trace " + t1) == 0);
  REQUIRE(run_cli("run --workload " + workload + " --method RH --pricing gsp --trace " + t2) == 0);
  const std::string a = slurp(t1);
  CHECK(a == slurp(t2));
  CHECK(std::count(a.begin(), a.end(), '\n') == 16);  // metadata line + one array per auction
}

TEST_CASE("the fast path and the reduced solve emit identical traces") {
  TempDir tmp;
  const auto workload = (tmp.path / "w.json").string();
  const auto rh = (tmp.path / "rh.jsonl").string();
  const auto ta = (tmp.path / "ta.jsonl").string();
  REQUIRE(run_cli("gen --n 25 --k 4 --auctions 40 --seed 13 --out " + workload) == 0);
  REQUIRE(run_cli("run --workload " + workload + " --method RH --trace " + rh) == 0);
  REQUIRE(run_cli("run --workload " + workload + " --method RHTALU --trace " + ta) == 0);
  // strip the metadata line (it names the method) and compare the records
  auto body = [](const std::string& text) { return text.substr(text.find('\n') + 1); };
  CHECK(body(slurp(rh)) == body(slurp(ta)));
}

TEST_CASE("validate accepts the example bids table") {
  TempDir tmp;
  const auto bids = tmp.path / "bids.json";
  std::ofstream(bids) << R"([{"formula": "conv", "value": 5},
                             {"formula": "slot1 | slot2", "value": 2}])";
  CHECK(run_cli("validate --bids " + bids.string() + " --k 3") == 0);
}

TEST_CASE("validate fails with exit 1 on bad rows") {
  TempDir tmp;
  const auto bids = tmp.path / "bids.json";
  std::ofstream(bids) << R"([{"formula": "slot9", "value": 5}])";
  CHECK(run_cli("validate --bids " + bids.string() + " --k 3") == 1);

  const auto negative = tmp.path / "neg.json";
  std::ofstream(negative) << R"([{"formula": "click", "value": -1}])";
  CHECK(run_cli("validate --bids " + negative.string() + " --k 3") == 1);
}

TEST_CASE("usage errors and malformed files exit with 2") {
  TempDir tmp;
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("gen --no-such-flag 1 --out x.json") == 2);
  CHECK(run_cli("validate --k 3") == 2);  // missing required --bids

  const auto garbage = tmp.path / "garbage.json";
  std::ofstream(garbage) << "{ not json";
  CHECK(run_cli("validate --bids " + garbage.string() + " --k 3") == 2);
  CHECK(run_cli("bench --workload " + garbage.string() + " --out t.csv") == 2);
}
