#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WUHAN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::filesystem::path temp(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("wuhan_cli_test_" + name);
}

} // namespace

TEST(Cli, ListAndSelfTest) {
    EXPECT_EQ(run_cli("list-scenarios"), 0);
    EXPECT_EQ(run_cli("self-test"), 0);
}

TEST(Cli, ValidationErrorsExitTwo) {
    EXPECT_EQ(run_cli("run --scenario nope"), 2);
    EXPECT_EQ(run_cli("run --scenario honest-w --check-fraction 1.5"), 2);
    EXPECT_EQ(run_cli("run --scenario honest-w --message 01x"), 2);
    EXPECT_EQ(run_cli("run --scenario honest-w --message 01 --msg-len 3"), 2);
    EXPECT_EQ(run_cli("run --scenario honest-w --format xml"), 2);
    EXPECT_EQ(run_cli("run"), 2);
}

TEST(Cli, RunWritesReproducibleReport) {
    const auto a = temp("a.json");
    const auto b = temp("b.json");
    ASSERT_EQ(run_cli("run --scenario oca-w --trials 3 --seed 9 --msg-len 50 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("run --scenario oca-w --trials 3 --seed 9 --msg-len 50 --jobs 2 --out " + b.string()), 0);
    const auto text = slurp(a);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, slurp(b));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(Cli, TranscriptAndCsv) {
    const auto t = temp("t.json");
    const auto c = temp("c.csv");
    ASSERT_EQ(run_cli("run --scenario honest-xi --format csv --out " + c.string() + " --transcript " + t.string()), 0);
    EXPECT_EQ(slurp(c).rfind("trial,seed,verdict", 0), 0u);
    EXPECT_NE(slurp(t).find("\"bell-result\""), std::string::npos);
    std::filesystem::remove(t);
    std::filesystem::remove(c);
}
