#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(KSELECT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) result.stdout_text.append(buf, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/kselect_cli_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("gen emits canonical edge lists") {
  const CliResult fig2 = run_cli("gen --instance figure2");
  CHECK(fig2.exit_code == 0);
  CHECK(fig2.stdout_text ==
        "n 6\nedge 1 2\nedge 3 1\nedge 4 1\nedge 4 2\nedge 4 3\nedge 4 5\nedge 4 6\nedge 6 2\n"
        "edge 6 5\n");

  const CliResult se = run_cli("gen --instance single-edge --n 10");
  CHECK(se.exit_code == 0);
  CHECK(se.stdout_text == "n 10\nedge 1 10\n");

  const CliResult tree = run_cli("gen --instance sliding-tree --t 4 --d 4");
  CHECK(tree.exit_code == 0);
  CHECK(tree.stdout_text.substr(0, 5) == "n 21\n");
  int edges = 0;
  for (size_t pos = 0; (pos = tree.stdout_text.find("edge ", pos)) != std::string::npos; ++pos)
    ++edges;
  CHECK(edges == 20);
}

TEST_CASE("gen star instances take a bit string") {
  const CliResult star = run_cli("gen --instance star --bits 101100");
  CHECK(star.exit_code == 0);
  CHECK(star.stdout_text == "n 7\nedge 1 7\nedge 3 7\nedge 4 7\n");
}

TEST_CASE("run reports the optimal selection on figure2") {
  const std::string path = write_temp("fig2.el", run_cli("gen --instance figure2").stdout_text);
  const CliResult res = run_cli("run --mechanism optimal --k 2 --graph " + path);
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.stdout_text);
  CHECK(j["samples"][0] == nlohmann::json::array({2, 5}));
}

TEST_CASE("run --mode exact reports the engine's distribution") {
  const std::string path =
      write_temp("se8.el", run_cli("gen --instance single-edge --n 8").stdout_text);
  const CliResult res = run_cli("run --mechanism mrp:m=2 --k 1 --graph " + path + " --mode exact");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.stdout_text);
  bool found = false;
  for (const auto& entry : j["agent_probabilities"])
    if (entry["agent"] == 8) {
      CHECK(entry["p"] == "513/2048");
      found = true;
    }
  CHECK(found);
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string path =
      write_temp("rand.el", run_cli("gen --instance random --n 12 --p 0.3 --seed 5").stdout_text);
  const std::string cmd =
      "run --mechanism mrp:m=2 --k 3 --graph " + path + " --trials 50 --seed 9";
  const CliResult a = run_cli(cmd);
  const CliResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.stdout_text == b.stdout_text);

  const std::string sweep_cmd = "sweep --instance random --n 40 --p 0.2 --ks 2,4 --trials 200";
  CHECK(run_cli(sweep_cmd).stdout_text == run_cli(sweep_cmd).stdout_text);
}

TEST_CASE("exit codes distinguish usage, guard, and violation") {
  CHECK(run_cli("run --mechanism borda --k 1 --graph /nonexistent").exit_code == 1);
  CHECK(run_cli("gen --instance star").exit_code == 1);  // missing --bits

  const std::string tiny = write_temp("tiny.el", "n 3\nedge 1 2\n");
  CHECK(run_cli("run --mechanism optimal --k 1 --graph " + tiny +
                " --mode exact --trials 5").exit_code == 1);
  CHECK(run_cli("run --mechanism optimal --k 1 --graph " + tiny +
                " --mode mc --trials 0").exit_code == 1);

  const std::string big =
      write_temp("big.el", run_cli("gen --instance random --n 30 --p 0.2").stdout_text);
  CHECK(run_cli("ratio --mechanism mrp:m=3 --k 2 --graph " + big + " --mode exact").exit_code == 2);

  const std::string mutual = write_temp("mutual.el", "n 2\nedge 1 2\nedge 2 1\n");
  const CliResult violated =
      run_cli("audit-sp --mechanism optimal --k 1 --n 2 --scope " + mutual);
  CHECK(violated.exit_code == 3);
  const auto j = nlohmann::json::parse(violated.stdout_text);
  CHECK(j["verdict"] == "violated");
  CHECK(j["counterexample"]["coalition"] == nlohmann::json::array({2}));

  CHECK(run_cli("audit-sp --mechanism mrp:m=2 --k 1 --n 3 --scope all").exit_code == 0);
  CHECK(run_cli("impossibility --n 3 --k 1").exit_code == 0);
}

TEST_CASE("impossibility reports zero feasible tables") {
  const CliResult res = run_cli("impossibility --n 3 --k 1");
  const auto j = nlohmann::json::parse(res.stdout_text);
  CHECK(j["feasible_count"] == 0);
  CHECK(j["table_space"] == "81");
  CHECK(j["parity_all_contradiction"] == true);
}

TEST_CASE("audit scope files hold multiple graphs separated by ---") {
  const std::string scope =
      write_temp("scope.el", "n 2\nedge 1 2\n---\nn 2\nedge 1 2\nedge 2 1\n");
  const CliResult res = run_cli("audit-sp --mechanism optimal --k 1 --n 2 --scope " + scope);
  CHECK(res.exit_code == 3);
  const auto j = nlohmann::json::parse(res.stdout_text);
  CHECK(j["instances_checked"].get<int>() >= 1);
}

TEST_CASE("csv and json reports carry identical values") {
  const std::string path =
      write_temp("se6.el", run_cli("gen --instance single-edge --n 6").stdout_text);
  const std::string base = "ratio --mechanism mrp:m=2 --k 1 --graph " + path + " --mode exact";
  const auto j = nlohmann::json::parse(run_cli(base).stdout_text);
  const CliResult csv = run_cli(base + " --format csv");
  CHECK(csv.exit_code == 0);
  std::istringstream in(csv.stdout_text);
  std::string header_line, row_line;
  REQUIRE(std::getline(in, header_line));
  REQUIRE(std::getline(in, row_line));
  const auto header = split_csv_line(header_line);
  const auto row = split_csv_line(row_line);
  REQUIRE(header.size() == row.size());
  for (size_t i = 0; i < header.size(); ++i) {
    const auto& key = header[i];
    if (!j.contains(key)) {
      CHECK(row[i].empty());
      continue;
    }
    if (j[key].is_string()) {
      CHECK(row[i] == j[key].get<std::string>());
    } else {
      CHECK(row[i] == j[key].dump());
    }
  }
}

TEST_CASE("witness command reports bounds") {
  const CliResult res = run_cli("witness --kind cycle --mechanism mrp:m=2 --k 1 --n 4");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.stdout_text);
  CHECK(j["bound"] == "2/1");
  CHECK(j["bound_met"] == true);

  const CliResult gsp = run_cli("witness --kind gsp --mechanism random-subset --k 1 --n 5");
  CHECK(gsp.exit_code == 0);
  const auto g = nlohmann::json::parse(gsp.stdout_text);
  CHECK(g["ratio_single"]["ratio"] == "5/1");
  CHECK(g["bound_met"] == true);
}

TEST_CASE("--m is an alternative to encoding m in the mechanism string") {
  const CliResult a = run_cli("audit-sp --mechanism mrp --m 2 --n 3 --k 1");
  const CliResult b = run_cli("audit-sp --mechanism mrp:m=2 --n 3 --k 1");
  CHECK(a.exit_code == 0);
  CHECK(a.stdout_text == b.stdout_text);
  CHECK(run_cli("audit-sp --mechanism mrp --n 3 --k 1").exit_code == 1);  // missing --m
}

TEST_CASE("sweep assigns the cube-root partition count") {
  const CliResult res = run_cli("sweep --instance random --n 40 --p 0.2 --ks 8,27 --trials 100");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.stdout_text);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["k"] == 8);
  CHECK(j["rows"][0]["m"] == 2);
  CHECK(j["rows"][1]["k"] == 27);
  CHECK(j["rows"][1]["m"] == 3);
  CHECK(j["rows"][0]["trials"] == 100);
}
