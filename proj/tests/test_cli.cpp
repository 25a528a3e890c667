#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "commands.hpp"

using namespace nct::cli;

namespace {

// value of key=... in a space separated line
double field(const std::string& line, const std::string& key)
{
    auto p = line.find(key + "=");
    if (p == std::string::npos)
        return std::nan("");
    return std::stod(line.substr(p + key.size() + 1));
}

std::string word(const std::string& line, const std::string& key)
{
    auto p = line.find(key + "=");
    if (p == std::string::npos)
        return "";
    p += key.size() + 1;
    return line.substr(p, line.find_first_of(" \n", p) - p);
}

struct Run {
    int code;
    std::string out, err;
};

Run eval(double x, double d, double n, bool sf = false)
{
    EvalRequest r;
    r.x = x, r.delta = d, r.n = n, r.sf = sf;
    std::ostringstream o, e;
    int c = cmd_eval(r, o, e);
    return {c, o.str(), e.str()};
}

Run sweep(SweepRequest r)
{
    std::ostringstream o, e;
    int c = cmd_sweep(r, o, e);
    return {c, o.str(), e.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& s)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ','))
            cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

int shell(const std::string& args, std::string* out = nullptr)
{
    std::string cmd = std::string(NCT_CLI_PATH) + " " + args + " > cli_out.txt 2>/dev/null";
    int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream f("cli_out.txt");
        std::stringstream ss;
        ss << f.rdbuf();
        *out = ss.str();
    }
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(Eval, QuadratureExample)
{
    auto r = eval(1, 5, 10);
    ASSERT_EQ(r.code, ok);
    EXPECT_NEAR(field(r.out, "value") / 4.347252856505909e-5, 1, 1e-13);
    EXPECT_EQ(word(r.out, "primary"), "value");
    EXPECT_LE(field(r.out, "est_rel_err"), 1e-13);
}

TEST(Eval, ZeroX)
{
    auto r = eval(0, 0, 7);
    ASSERT_EQ(r.code, ok);
    EXPECT_EQ(field(r.out, "value"), 0.5);
    EXPECT_EQ(field(r.out, "complement"), 0.5);
}

TEST(Eval, SurvivalKeepsSmallTail)
{
    // with --sf the tiny F rides in complement
    auto r = eval(5, 20, 10.3, true);
    ASSERT_EQ(r.code, ok);
    EXPECT_NEAR(field(r.out, "complement") / 7.8907450350613951e-21, 1, 1e-12);
    EXPECT_EQ(field(r.out, "value"), 1);
}

TEST(Eval, BadArguments)
{
    EXPECT_EQ(eval(1, 1, 0).code, bad_args);
    EXPECT_EQ(eval(1, 1, -3).code, bad_args);
    EXPECT_EQ(eval(std::nan(""), 1, 3).code, bad_args);
}

TEST(Table, FirstTwoPass)
{
    for (const char* id : {"T1", "T2"}) {
        auto rep = run_table(id);
        EXPECT_TRUE(rep.pass()) << id;
        std::ostringstream o, e;
        EXPECT_EQ(cmd_table(id, true, o, e), ok) << id;
        EXPECT_EQ(run_table(id).rows.size(), rep.rows.size());
    }
}

TEST(Table, ExampleAndTrapezoidPass)
{
    EXPECT_TRUE(run_table("EX1").pass());
    EXPECT_TRUE(run_table("TRAP").pass());
}

TEST(Table, UnknownId)
{
    std::ostringstream o, e;
    EXPECT_EQ(cmd_table("T9", false, o, e), bad_args);
}

TEST(Sweep, MonotoneInDelta)
{
    SweepRequest r;
    r.var = "delta", r.from = -5, r.to = 10, r.count = 61, r.x = 5, r.n = 10;
    auto s = sweep(r);
    ASSERT_EQ(s.code, ok) << s.err;
    auto rows = csv(s.out);
    ASSERT_EQ(rows.size(), 62u);
    EXPECT_EQ(rows[0][0], "var");
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LE(std::stod(rows[i][1]), std::stod(rows[i - 1][1])) << rows[i][0];
        EXPECT_GE(std::stod(rows[i][2]), std::stod(rows[i - 1][2])) << rows[i][0];
    }
}

TEST(Sweep, MonotoneInX)
{
    SweepRequest r;
    r.var = "x", r.from = -5, r.to = 15, r.count = 81, r.delta = 5, r.n = 10;
    auto s = sweep(r);
    ASSERT_EQ(s.code, ok) << s.err;
    auto rows = csv(s.out);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_GE(std::stod(rows[i][1]), std::stod(rows[i - 1][1])) << rows[i][0];
        EXPECT_LE(std::stod(rows[i][2]), std::stod(rows[i - 1][2])) << rows[i][0];
    }
}

TEST(Sweep, SinglePointMatchesEval)
{
    SweepRequest r;
    r.var = "n", r.from = 10, r.to = 10, r.count = 1, r.x = 1, r.delta = 5;
    auto s = sweep(r);
    ASSERT_EQ(s.code, ok);
    auto rows = csv(s.out);
    ASSERT_EQ(rows.size(), 2u);
    auto e = eval(1, 5, 10);
    EXPECT_EQ(rows[1][1], word(e.out, "value"));
    EXPECT_EQ(rows[1][2], word(e.out, "complement"));
    EXPECT_EQ(rows[1][4], word(e.out, "method"));
}

TEST(Sweep, InvalidRanges)
{
    SweepRequest r;
    r.var = "x", r.from = 2, r.to = 1, r.count = 5, r.delta = 1, r.n = 3;
    EXPECT_EQ(sweep(r).code, bad_args);
    r.from = 0, r.to = 1, r.count = 0;
    EXPECT_EQ(sweep(r).code, bad_args);
    r.count = 1;
    EXPECT_EQ(sweep(r).code, bad_args);
    r.var = "n", r.from = -1, r.to = 4, r.count = 3;
    EXPECT_EQ(sweep(r).code, bad_args);
    r.var = "y", r.from = 0;
    EXPECT_EQ(sweep(r).code, bad_args);
}

TEST(Compare, ModerateDeltaRoutesAgree)
{
    auto p = compare_point(20, 10, 30, {});
    int ran = 0;
    for (const auto& r : p.routes) {
        if (r.method == nct::Method::series || r.method == nct::Method::trapezoid) {
            ASSERT_TRUE(r.ran);
            EXPECT_FALSE(r.exceeds);
            EXPECT_LT(r.deviation, 1e-13);
        }
        ran += r.ran;
    }
    EXPECT_GE(ran, 3);
}

TEST(Compare, GammaBeatsElementary)
{
    auto p = compare_point(10.3, 20, 5, {});
    double elem = -1, gamma = -1;
    for (const auto& r : p.routes) {
        if (r.method == nct::Method::large_delta_elem && r.ran)
            elem = r.deviation;
        if (r.method == nct::Method::large_delta_gamma && r.ran)
            gamma = r.deviation;
    }
    ASSERT_GE(elem, 0);
    ASSERT_GE(gamma, 0);
    EXPECT_LT(gamma, elem);
    EXPECT_LT(gamma, 1e-13);
}

TEST(Compare, SeriesSkippedAtHugeDelta)
{
    auto p = compare_point(1000, 1010, 1000, {});
    for (const auto& r : p.routes)
        if (r.method == nct::Method::series) {
            EXPECT_FALSE(r.ran);
            EXPECT_FALSE(r.note.empty());
        }
    EXPECT_NEAR(p.reference.value / 0.32243828666171684, 1, 1e-13);
}

TEST(Binary, ExitCodes)
{
    EXPECT_EQ(shell("eval --x 1 --delta 5 --n 10"), 0);
    EXPECT_EQ(shell("eval --delta 5 --n 10"), 2);
    EXPECT_EQ(shell("eval --x 1 --delta 5 --n 10 --method nonsense"), 2);
    EXPECT_EQ(shell("sweep --var x --from 3 --to 1 --count 4 --delta 1 --n 3"), 2);
    EXPECT_EQ(shell("table T1"), 0);
    EXPECT_EQ(shell("--help"), 0);
}

TEST(Binary, ConfigFileOverridesDefaults)
{
    {
        std::ofstream f("cli_test.conf");
        f << "method=trapezoid\n";
    }
    std::string out;
    ASSERT_EQ(shell("--config cli_test.conf eval --x 1 --delta 5 --n 10", &out), 0);
    EXPECT_EQ(word(out, "method"), "trapezoid");
    ASSERT_EQ(shell("eval --x 1 --delta 5 --n 10", &out), 0);
    EXPECT_NE(word(out, "method"), "trapezoid");
    std::remove("cli_test.conf");
}
