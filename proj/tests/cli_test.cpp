#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "test_support.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
    const std::string cmd = std::string(CDCHASE_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const std::string& name) { return cdchase::testing::fixture_path(name); }

std::string employees() { return "--schema " + fx("employees.schema") + " --deps " + fx("employees.deps"); }

TEST(Cli, ValidateAccepts) {
    const auto r = cli("validate " + employees());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("accepted"), std::string::npos);
}

TEST(Cli, ValidateRejectsWithCode2) {
    const auto r = cli("validate --schema " + fx("employees.schema") + " --deps " + fx("employees_no_dept.deps"));
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("(e) works_in position 2"), std::string::npos);
}

TEST(Cli, ChaseCompletes) {
    const auto r = cli("chase " + employees() + " --data " + fx("manager.data") + " --format json");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"status\": \"completed\""), std::string::npos);
}

TEST(Cli, ChaseFailureCode3) {
    const auto r = cli("chase --schema " + fx("keyclash.schema") + " --deps " + fx("keyclash.deps") + " --data " +
                       fx("keyclash.data"));
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("error[chase_failed]"), std::string::npos);
}

TEST(Cli, BudgetExhaustedCode4) {
    const auto r = cli("chase " + employees() + " --data " + fx("manager.data") + " --max-steps 1");
    EXPECT_EQ(r.code, 4) << r.out;
    EXPECT_NE(r.out.find("error[budget_exhausted]"), std::string::npos);
}

TEST(Cli, InputErrorsCode5) {
    EXPECT_EQ(cli("chase " + employees() + " --data " + fx("employees.deps")).code, 5);
    EXPECT_EQ(cli("validate --schema /nonexistent --deps " + fx("employees.deps")).code, 5);
    EXPECT_EQ(cli("frobnicate").code, 5);
    EXPECT_EQ(cli("repro --n 1").code, 5);
    const auto r = cli("chase " + employees() + " --data " + fx("manager.data") + " --max-steps 0");
    EXPECT_EQ(r.code, 5);
    EXPECT_NE(r.out.find("error["), std::string::npos);
}

TEST(Cli, QueryReportsLevelBound) {
    const auto r = cli("query " + employees() + " --data " + fx("manager.data") + " --query " + fx("is_employee.query") +
                       " --level 2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("level bound: 2"), std::string::npos);
    EXPECT_NE(r.out.find("(m)"), std::string::npos);
}

TEST(Cli, Contain) {
    const auto r = cli("contain " + employees() + " --q1 " + fx("is_manager.query") + " --q2 " + fx("is_employee.query") +
                       " --level 2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.rfind("contained", 0), 0u);
}

TEST(Cli, Repro) {
    const auto r = cli("repro --n 3 --json");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"gap\": 4"), std::string::npos);
    const auto dot = cli("repro --n 3 --dot");
    EXPECT_EQ(dot.code, 0);
    EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
}

}  // namespace
