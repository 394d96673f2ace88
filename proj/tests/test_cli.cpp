#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MSGCLASS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("command line end to end") {
  const fs::path dir = fs::temp_directory_path() / "msgclass_cli_test";
  fs::remove_all(dir);
  const std::string d = dir.string();

  REQUIRE(run("generate -n 200 --seed 3 -o " + d + "/data") == 0);
  CHECK(fs::exists(dir / "data/corpus.csv"));
  CHECK(fs::exists(dir / "data/lexicons"));

  REQUIRE(run("validate --corpus " + d + "/data/corpus.csv -o " + d + "/validate") == 0);
  CHECK(fs::exists(dir / "validate/validation.json"));

  const std::string eval = "evaluate --corpus " + d + "/data/corpus.csv --model majority --k 3 --repeats 2 --subsets general";
  REQUIRE(run(eval + " -o " + d + "/a") == 0);
  REQUIRE(run(eval + " -o " + d + "/b") == 0);
  for (const char* f : {"report.json", "report.txt", "confusion.txt", "folds.csv", "fold_plan.json", "config.json"})
    CHECK(fs::exists(dir / "a" / f));
  const auto report = read_json(dir / "a/report.json");
  CHECK(report.at("folds").size() == 6);
  // Reproducible from the same inputs, wherever the output goes.
  CHECK(read_json(dir / "a/report.json") == read_json(dir / "b/report.json"));

  REQUIRE(run("compare " + d + "/a/report.json " + d + "/b/report.json -o " + d + "/cmp") == 0);
  CHECK(read_json(dir / "cmp/comparison.json").at("p_rope").get<double>() == 1.0);

  // Re-running from the written config reproduces the report.
  REQUIRE(run("evaluate -c " + d + "/a/config.json -o " + d + "/c") == 0);
  CHECK(read_json(dir / "c/report.json") == report);

  CHECK(run("evaluate --corpus " + d + "/missing.csv -o " + d + "/x") == 2);
  CHECK(run("evaluate --corpus " + d + "/data/corpus.csv --model forest -o " + d + "/x") == 1);
  CHECK(run("") == 1);
  CHECK(run("evaluate --corpus " + d + "/data/corpus.csv --learning-rate nan -o " + d + "/x") != 0);

  fs::remove_all(dir);
}
