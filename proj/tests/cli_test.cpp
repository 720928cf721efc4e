#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <doctest.h>

#ifndef QGOSSIP_CLI_PATH
#error "QGOSSIP_CLI_PATH must point at the built qgossip binary"
#endif

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(QGOSSIP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/qgossip_cli_test_") + name;
}

}  // namespace

TEST_CASE("simulate emits a csv row under the lemma-3 bound") {
  const auto result = run_cli(
      "simulate --alg qc --graph complete:8 --init halfsplit:8 --trials 500 --seed 7 "
      "--format csv");
  CHECK(result.exit_code == 0);
  REQUIRE(result.output.rfind("algorithm,n,trials,seed,mean,se,min,max,failures,bound\n", 0) ==
          0);
  const std::string row = result.output.substr(result.output.find('\n') + 1);
  CHECK(row.rfind("qc,8,500,7,", 0) == 0);
  const double mean = std::stod(row.substr(row.find("7,") + 2));
  CHECK(mean < 56.0);
}

TEST_CASE("identical invocations give byte-identical csv") {
  const std::string args =
      "simulate --alg qa --graph complete:4 --init qaworst:4 --trials 300 --seed 11 "
      "--format csv";
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
}

TEST_CASE("qa on a non-complete graph is a usage error naming the requirement") {
  const auto result = run_cli("simulate --alg qa --graph path:3 --init 1,0,0 --trials 5 --seed 1");
  CHECK(result.exit_code == 2);
}

TEST_CASE("hitting-time prints solver and closed-form columns") {
  const auto result = run_cli("hitting-time chain-i:3 --format csv");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("1,3.000000000,3.000000000,0.000000000") != std::string::npos);
  CHECK(result.output.find("2,3.000000000,3.000000000,0.000000000") != std::string::npos);
}

TEST_CASE("hitting-time reports the chain-III bound") {
  const auto result = run_cli("hitting-time chain-iii-l1:6");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("lower-row bound") != std::string::npos);
}

TEST_CASE("unreachable matrix target exits 3") {
  const std::string path = temp_path("unreachable.chain");
  {
    std::ofstream file(path);
    file << "states 2 target 2\n1 0\n0 1\n";
  }
  const auto result = run_cli("hitting-time " + path);
  CHECK(result.exit_code == 3);
  std::remove(path.c_str());
}

TEST_CASE("bounds json carries the report schema") {
  const auto result = run_cli("bounds --n 4 --m 0 --M 2 --format json");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"theorem2\": 144.0") != std::string::npos);
  CHECK(result.output.find("\"prop4_onedecay\": null") != std::string::npos);
}

TEST_CASE("verify requires a seed") {
  const auto result = run_cli("verify --depth small");
  CHECK(result.exit_code == 2);
}

TEST_CASE("verify reports json with a stable schema") {
  const auto result = run_cli("verify --depth small --seed 42 --format json");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"all_passed\": true") != std::string::npos);
  CHECK(result.output.find("\"name\": \"oracle-equivalence\"") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
  const auto result = run_cli("simulate --no-such-flag 1");
  CHECK(result.exit_code == 2);
}

TEST_CASE("sweep prints one csv row per node count") {
  const auto result = run_cli("sweep --alg qc --n 4,8 --trials 100 --seed 3 --format csv");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("qc,4,100,3,") != std::string::npos);
  CHECK(result.output.find("qc,8,100,3,") != std::string::npos);
}

TEST_CASE("a config file can describe the whole invocation") {
  const std::string path = temp_path("config.json");
  {
    std::ofstream file(path);
    file << R"({"subcommand":"simulate","alg":"qc","graph":"complete:2","init":"1,0",)"
         << R"("trials":50,"seed":9,"format":"csv"})";
  }
  const auto result = run_cli("--config " + path);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("qc,2,50,9,1.000000000") != std::string::npos);

  // explicit flags override the config values
  const auto overridden = run_cli("simulate --config " + path + " --trials 70");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("qc,2,70,9,") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("edge-list files drive simulations") {
  const std::string path = temp_path("graph.edges");
  {
    std::ofstream file(path);
    file << "# complete two-node digraph with lopsided activation\n"
         << "n 2 2\n"
         << "1 2 0.9\n"
         << "2 1 0.1\n";
  }
  const auto result = run_cli("simulate --alg qc --graph " + path +
                              " --init 1,0 --trials 100 --seed 4 --format csv");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("qc,2,100,4,1.000000000") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("lyapunov trace rows have the documented columns") {
  const std::string path = temp_path("trace.csv");
  const auto result = run_cli(
      "simulate --alg qa --graph complete:4 --init qaworst:4 --trials 1 --seed 2 --format csv "
      "--trace " +
      path);
  CHECK(result.exit_code == 0);
  std::ifstream file(path);
  REQUIRE(file.good());
  std::string header;
  std::getline(file, header);
  CHECK(header == "k,rule,D,S_plus,S_minus,V");
  std::string row;
  CHECK(std::getline(file, row).good());
  std::remove(path.c_str());
}
