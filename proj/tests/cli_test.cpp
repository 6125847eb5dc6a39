#include "cli.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace embedlab::cli {
namespace {

using nlohmann::json;

struct Captured {
  int code = 0;
  std::string out;
  std::string err;
};

Captured call(std::vector<std::string> args) {
  std::ostringstream out, err;
  Captured c;
  c.code = run(std::move(args), out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

// Runs the installed binary through the shell and returns stdout and the exit code.
Captured shell(const std::string& arguments) {
  const std::string command = std::string(EMBEDLAB_BINARY) + " " + arguments + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  Captured c;
  if (!pipe) {
    c.code = -1;
    return c;
  }
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) c.out.append(buffer.data(), got);
  const int status = pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

TEST(CliTest, RoundnessCsvRows) {
  const auto c = call({"roundness", "--format", "csv", "--n-from", "3", "--n-to", "5"});
  ASSERT_EQ(c.code, kExitOk);
  std::istringstream lines(c.out);
  std::string header, row3, row4, row5;
  std::getline(lines, header);
  std::getline(lines, row3);
  std::getline(lines, row4);
  std::getline(lines, row5);
  EXPECT_EQ(header, "n,lower_bound_num,lower_bound_den,float");
  EXPECT_EQ(row3.substr(0, 6), "3,4,5,");
  EXPECT_EQ(row4.substr(0, 6), "4,1,1,");
  EXPECT_EQ(row5.substr(0, 6), "5,8,7,");
}

TEST(CliTest, SpaceJsonForLevelOne) {
  const auto c = call({"space", "--n", "1"});
  ASSERT_EQ(c.code, kExitOk);
  const auto doc = json::parse(c.out);
  EXPECT_EQ(doc["label"], "M");
  EXPECT_EQ(doc["n"], 1);
  EXPECT_EQ(doc["points"], json::parse(R"(["root","1","{1}"])"));
  EXPECT_EQ(doc["dist"], json::parse("[[0,1,2],[1,0,1],[2,1,0]]"));
}

TEST(CliTest, SpaceCsvHasHeaderAndRows) {
  const auto c = call({"space", "--n", "2", "--format", "csv"});
  ASSERT_EQ(c.code, kExitOk);
  std::istringstream lines(c.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 1 + 6);
  EXPECT_EQ(c.out.substr(0, 12), "point,root,1");
}

TEST(CliTest, CheckIsometryReportsNoViolations) {
  const auto c = call({"check-isometry", "--n", "3"});
  ASSERT_EQ(c.code, kExitOk);
  const auto doc = json::parse(c.out);
  EXPECT_TRUE(doc["violations"].is_array());
  EXPECT_TRUE(doc["violations"].empty());
  EXPECT_NE(c.out.find("\"violations\":[]"), std::string::npos);
}

TEST(CliTest, RationalsAreAlwaysFractions) {
  const auto c = call({"bijection-constants", "--n", "4"});
  ASSERT_EQ(c.code, kExitOk);
  const auto doc = json::parse(c.out);
  EXPECT_EQ(doc["lip_forward"], "2/1");
  EXPECT_EQ(doc["lip_inverse"], "2/1");
  EXPECT_EQ(doc["product"], "4/1");
}

TEST(CliTest, FreeNormOfDipole) {
  const auto c = call({"free-norm", "--n", "2", "--molecule", R"({"weights":{"1":"1","{2}":"-1"}})"});
  ASSERT_EQ(c.code, kExitOk);
  const auto doc = json::parse(c.out);
  EXPECT_EQ(doc["norm"], "3/1");
  EXPECT_EQ(doc["gap"], "0/1");
}

TEST(CliTest, DeficitOfCertificate) {
  const auto c = call({"deficit", "--n", "5"});
  ASSERT_EQ(c.code, kExitOk);
  EXPECT_EQ(json::parse(c.out)["deficit"], "-5/1");
}

TEST(CliTest, WitnessOnFrechetMap) {
  const auto c = call({"witness", "--n", "2", "--A", "1", "--B", "2"});
  ASSERT_EQ(c.code, kExitOk);
  const auto doc = json::parse(c.out);
  EXPECT_TRUE(doc["feasible"].get<bool>());
  EXPECT_EQ(doc["min_separation"], "2/1");
}

TEST(CliTest, SpaceFileRoundTrip) {
  const auto first = call({"space", "--n", "2"});
  ASSERT_EQ(first.code, kExitOk);
  const auto path = temp_file("embedlab_cli_space.json", first.out);
  const auto matrix = call({"dist-matrix", "--space-file", path.string()});
  ASSERT_EQ(matrix.code, kExitOk);
  EXPECT_EQ(json::parse(matrix.out)["dist"], json::parse(first.out)["dist"]);
  const auto iso = call({"check-isometry", "--space-file", path.string()});
  EXPECT_EQ(iso.code, kExitOk);
  std::filesystem::remove(path);
}

TEST(CliTest, TamperedSpaceFileIsRejected) {
  auto doc = json::parse(call({"space", "--n", "2"}).out);
  doc["dist"][0][5] = 9;
  doc["dist"][5][0] = 9;
  const auto path = temp_file("embedlab_cli_bad_space.json", doc.dump());
  const auto c = call({"dist-matrix", "--space-file", path.string()});
  EXPECT_EQ(c.code, kExitValidation);
  EXPECT_FALSE(json::parse(c.out)["violations"].empty());
  const auto norm = call({"free-norm", "--space-file", path.string(), "--molecule",
                          R"({"weights":{"root":"1","{2}":"-1"}})"});
  EXPECT_EQ(norm.code, kExitValidation);
  std::filesystem::remove(path);
}

TEST(CliTest, ExitCodeContract) {
  EXPECT_EQ(call({"space"}).code, kExitUsage);
  EXPECT_EQ(call({"space", "--n", "1", "--bogus", "1"}).code, kExitUsage);
  EXPECT_EQ(call({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(call({"witness", "--n", "2", "--A", "1", "--B", "2", "--format", "csv"}).code, kExitUsage);
  EXPECT_EQ(call({"free-norm", "--n", "2", "--molecule", R"({"weights":{"1":"1"}})"}).code,
            kExitValidation);
  EXPECT_EQ(call({"space", "--n", "99"}).code, kExitValidation);
  EXPECT_EQ(call({"witness", "--n", "2", "--A", "1", "--B", "1"}).code, kExitValidation);
  EXPECT_EQ(call({"perturb-bound", "--c1", "1/10", "--c2", "3/2", "--eta", "1"}).code,
            kExitInfeasible);
}

TEST(CliTest, ErrorsGoToStderr) {
  const auto c = call({"space", "--n", "99"});
  EXPECT_TRUE(c.out.empty());
  EXPECT_FALSE(c.err.empty());
}

TEST(CliTest, MaxLevelFlagAndEnvironment) {
  EXPECT_EQ(call({"--max-n", "2", "space", "--n", "3"}).code, kExitValidation);
  ::setenv("EMBEDLAB_MAX_N", "2", 1);
  EXPECT_EQ(call({"space", "--n", "3"}).code, kExitValidation);
  EXPECT_EQ(call({"space", "--n", "2"}).code, kExitOk);
  ::unsetenv("EMBEDLAB_MAX_N");
  EXPECT_EQ(call({"space", "--n", "3"}).code, kExitOk);
}

TEST(CliTest, BinaryEmbedSearchIsDeterministic) {
  const std::string args = "embed-search --n 2 --target l1 --dim 6 --restarts 3 --iters 200 --seed 7";
  const auto a = shell(args);
  const auto b = shell(args);
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  const auto threaded = shell(args + " --threads 3");
  EXPECT_EQ(threaded.out, a.out);
}

TEST(CliTest, BinaryExitCodes) {
  EXPECT_EQ(shell("space --n 1").code, kExitOk);
  EXPECT_EQ(shell("space --n 1 --bogus").code, kExitUsage);
  EXPECT_EQ(shell("space --n 99").code, kExitValidation);
  EXPECT_EQ(shell("perturb-bound --c1 1/10 --c2 3/2 --eta 1").code, kExitInfeasible);
  EXPECT_EQ(shell("--max-n 2 space --n 3").code, kExitValidation);
  EXPECT_EQ(shell("space --n 3").code, kExitOk);
}

TEST(CliTest, BinaryHonorsEnvironmentCap) {
  const std::string command = "EMBEDLAB_MAX_N=2 " + std::string(EMBEDLAB_BINARY) + " space --n 3 2>/dev/null";
  const int status = std::system(command.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitValidation);
}

}  // namespace
}  // namespace embedlab::cli
