#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "skewsds_cli.hpp"

namespace fs = std::filesystem;
using namespace skewsds;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir()
        : path_(fs::temp_directory_path() / ("skewsds-cli-" + std::to_string(::getpid()) + "-" +
                                             std::to_string(counter_++)))
    {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

void write(const std::string& path, const std::string& text)
{
    std::ofstream(path) << text;
}

std::size_t count(const std::string& s, const std::string& what)
{
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1))
        ++n;
    return n;
}

} // namespace

TEST(Cli, Usage)
{
    EXPECT_EQ(run({}).code, cli::usage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::usage);
    EXPECT_EQ(run({"params"}).code, cli::usage);
    EXPECT_EQ(run({"params", "seven"}).code, cli::usage);
    EXPECT_EQ(run({"verify"}).code, cli::usage);
    EXPECT_EQ(run({"--help"}).code, cli::ok);
}

TEST(Cli, Params)
{
    auto r = run({"params", "7"});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_EQ(r.out, "(7;3,3,1;2)  n=5\n(7;2,2,2;1)  n=5\n");
    EXPECT_EQ(run({"params", "12"}).code, cli::bad_input);
    EXPECT_NE(run({"params", "239"}).out.find("(239;119,112,106;158)  n=179"), std::string::npos);
}

TEST(Cli, ParamsJson)
{
    auto r = run({"params", "7", "--format", "json"});
    ASSERT_EQ(r.code, cli::ok);
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["k"], nlohmann::json({3, 3, 1}));
    EXPECT_EQ(j[0]["lambda"], 2);
    EXPECT_EQ(j[1]["n"], 5);
}

TEST(Cli, VerifyById)
{
    auto r = run({"verify", "--id", "appx-11-4-4-3"});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_EQ(r.out.substr(0, 4), "PASS");
    EXPECT_EQ(run({"verify", "--id", "sec3-family1"}).code, cli::ok);
    EXPECT_EQ(run({"verify", "--id", "sec4-family3"}).code, cli::verify_fail);
    EXPECT_EQ(run({"verify", "--id", "no-such-entry"}).code, cli::bad_input);
    EXPECT_EQ(run({"verify", "--id", "appx-71-34-32-28"}).code, cli::bad_input);
}

TEST(Cli, VerifyTamperedFile)
{
    TempDir d;
    const std::string good = "sds id=t v=11 k=4,4,3 lambda=3 status=verified\n"
                             "provenance: test\n"
                             "block: 0 1 3 5\nblock: 0 1 4 5\nblock: 0 2 5\nend\n";
    write(d.file("good.sds"), good);
    EXPECT_EQ(run({"verify", d.file("good.sds")}).code, cli::ok);

    std::string bad = good;
    bad.replace(bad.find("0 2 5"), 5, "0 2 6");
    write(d.file("bad.sds"), bad);
    auto r = run({"verify", d.file("bad.sds")});
    EXPECT_EQ(r.code, cli::verify_fail);
    EXPECT_NE(r.out.find("FAIL t"), std::string::npos);
    EXPECT_NE(r.out.find("histogram"), std::string::npos);

    EXPECT_EQ(run({"verify", d.file("missing.sds")}).code, cli::bad_input);
    write(d.file("broken.sds"), "sds id=t v=11 k=4 lambda=3 status=open\nblock: 0 1");
    EXPECT_EQ(run({"verify", d.file("broken.sds")}).code, cli::bad_input);
}

TEST(Cli, SearchAppendsToCorpus)
{
    TempDir d;
    const auto out = d.file("found.sds");
    auto r = run({"search", "19", "9,7,6", "--q", "3", "--seed", "1", "--out", out});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    EXPECT_EQ(r.out.find("seed:"), std::string::npos);
    std::ifstream in(out);
    auto c = load_catalog(in);
    ASSERT_GE(c.size(), 1u);
    EXPECT_TRUE(verify_sds(*c.entries()[0].family, 8).ok);
    EXPECT_EQ(run({"verify", out}).code, cli::ok);

    // a second run appends
    run({"search", "19", "9,7,6", "--q", "3", "--seed", "2", "--out", out});
    std::ifstream again(out);
    EXPECT_EQ(load_catalog(again).size(), 2u);
}

TEST(Cli, SearchDeterministicAndSeedReporting)
{
    auto a = run({"search", "31", "15,15,10", "--q", "5", "--seed", "9", "--strategy", "local"});
    auto b = run({"search", "31", "15,15,10", "--q", "5", "--seed", "9", "--strategy", "local"});
    EXPECT_EQ(a.out, b.out);
    auto c = run({"search", "19", "9,7,6", "--q", "3"});
    EXPECT_EQ(c.out.substr(0, 6), "seed: ");
}

TEST(Cli, SearchInfeasible)
{
    auto r = run({"search", "107", "49,48,46", "--q", "3", "--seed", "1"});
    EXPECT_EQ(r.code, cli::bad_input);
    EXPECT_NE(r.err.find("does not divide"), std::string::npos);
    auto s = run({"search", "107", "49,48,46", "--q", "53", "--seed", "1"});
    EXPECT_EQ(s.code, cli::bad_input);
    EXPECT_NE(s.err.find("block 1"), std::string::npos);
    EXPECT_EQ(run({"search", "19", "9,x,6", "--q", "3", "--seed", "1"}).code, cli::bad_input);
    EXPECT_EQ(run({"search", "19", "9,7,6"}).code, cli::usage);
}

TEST(Cli, SearchSkewGs)
{
    auto r = run({"search", "7", "3,3,3,1", "--q", "3", "--seed", "1", "--skew-gs", "--max-solutions", "5"});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_NE(r.out.find("skew-Hadamard of order 28: PASS"), std::string::npos);
    EXPECT_EQ(count(r.out, "FAIL"), 0u);
}

TEST(Cli, HadamardNineFiftySix)
{
    TempDir d;
    auto r = run({"hadamard", "--id", "sec3-family1", "--paley-todd", "--out", d.file("h.txt")});
    ASSERT_EQ(r.code, cli::ok) << r.out << r.err;
    std::ifstream in(d.file("h.txt"));
    auto m = read_matrix(in);
    EXPECT_EQ(m.order(), 956u);
    EXPECT_TRUE(is_skew_hadamard(m));
}

TEST(Cli, HadamardSectionFour)
{
    // printed family 3 does not verify; its recovered form does
    auto printed = run({"hadamard", "--id", "sec4-family3"});
    EXPECT_EQ(printed.code, cli::hadamard_fail);
    EXPECT_NE(printed.out.find("not an SDS"), std::string::npos);
    auto r = run({"hadamard", "--id", "sec4-family3-reconstructed", "--out", "-"});
    ASSERT_EQ(r.code, cli::ok);
    EXPECT_EQ(r.out.substr(0, 5), "1324\n");
    EXPECT_EQ(run({"hadamard", "--id", "sec4-family1"}).code, cli::ok);
}

TEST(Cli, HadamardFailures)
{
    TempDir d;
    // first block {0,1,3} is not skew
    write(d.file("f.sds"), "sds id=t v=7 k=3,3,3,1 lambda=3 status=verified\n"
                           "block: 0 1 3\nblock: 1 2 4\nblock: 0 1 3\nblock: 0\nend\n");
    auto r = run({"hadamard", d.file("f.sds")});
    EXPECT_EQ(r.code, cli::hadamard_fail);
    EXPECT_NE(r.out.find("skew"), std::string::npos);
    // three blocks without --paley-todd
    EXPECT_EQ(run({"hadamard", "--id", "sec3-family1"}).code, cli::hadamard_fail);
}

TEST(Cli, EquivSectionThree)
{
    auto r = run({"equiv", "sec3-family1", "sec3-family2", "sec3-family3"});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_EQ(count(r.out, "NONEQUIVALENT"), 3u);
}

TEST(Cli, EquivSectionFour)
{
    std::vector<std::string> args{"equiv"};
    for (int i = 1; i <= 6; ++i)
        args.push_back("sec4-family" + std::to_string(i));
    auto r = run(args);
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_EQ(count(r.out, "NONEQUIVALENT"), 15u);
}

TEST(Cli, EquivShiftedFile)
{
    TempDir d;
    write(d.file("f.sds"), "sds id=f v=11 k=4,4,3 lambda=3 status=verified\n"
                           "block: 0 1 3 5\nblock: 0 1 4 5\nblock: 0 2 5\nend\n");
    // 2*X + shifts, blocks 1 and 2 swapped
    write(d.file("g.sds"), "sds id=f-shifted v=11 k=4,4,3 lambda=3 status=verified\n"
                           "block: 3 5 0 2\nblock: 1 3 7 0\nblock: 6 10 5\nend\n");
    auto r = run({"equiv", d.file("f.sds"), d.file("g.sds")});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_NE(r.out.find("f f-shifted EQUIVALENT"), std::string::npos);
    EXPECT_EQ(run({"equiv", "sec3-family1", "nothing-here"}).code, cli::bad_input);
}

TEST(Cli, Table1)
{
    auto r = run({"table1"});
    EXPECT_EQ(r.code, cli::ok);
    EXPECT_EQ(count(r.out, " yes "), 28u + 1) << "28 rows plus the header";
    auto j = nlohmann::json::parse(run({"table1", "--format", "json"}).out);
    EXPECT_EQ(j["rows"].size(), 36u);
    EXPECT_TRUE(j["match"].get<bool>());
}

TEST(Cli, Table1Mismatch)
{
    TempDir d;
    // a catalog without any data leaves every row at "?"
    write(d.file("empty.sds"), "sds id=x v=7 k=2,2,2 lambda=1 status=open\nend\n");
    auto r = run({"--catalog", d.file("empty.sds"), "table1"});
    EXPECT_EQ(r.code, cli::table_mismatch);
    EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
}
