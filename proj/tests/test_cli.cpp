#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "regroup/cli.hpp"

using nlohmann::json;
using regroup::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;

    json report() const { return json::parse(out); }
};

Result call(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("regroup_cli_" + name)).string();
}

}  // namespace

TEST(Cli, CertifyPasses) {
    auto r = call({"certify", "--f", "x + 1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.report();
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["certification"]["displacement"], "above-identity");
}

TEST(Cli, CertifyRejectsFixedPoint) {
    auto r = call({"certify", "--f", "2*x + 1"});
    EXPECT_EQ(r.code, 1);
    auto j = r.report();
    EXPECT_EQ(j["error"]["kind"], "FixedPointDetected");
    EXPECT_NEAR(j["error"]["at"].get<double>(), -1.0, 0.05);
}

TEST(Cli, SyntaxErrorCarriesOffset) {
    auto r = call({"certify", "--f", "x +"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.report()["error"]["kind"], "SyntaxError");
    EXPECT_EQ(r.report()["error"]["offset"], 3);
}

TEST(Cli, RebuildTranslation) {
    auto r = call({"rebuild", "--f", "x + 3", "--samples", "200", "--triples", "20"});
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = r.report();
    EXPECT_EQ(j["conjugacy"]["unit"], 3.0);
    EXPECT_TRUE(j["shift"]["pass"].get<bool>());
    EXPECT_EQ(j["axioms"].size(), 5u);
    EXPECT_EQ(j["rng"]["seed"], 20240601);
}

TEST(Cli, RebuildFixedPointExitsOne) {
    auto r = call({"rebuild", "--f", "2*x + 1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.report()["error"]["kind"], "FixedPointDetected");
}

TEST(Cli, RebuildSameSeedSameReport) {
    std::vector<std::string> args{"rebuild", "--f", "x + 0.5 + 0.4*sin(x)", "--samples", "100",
                                  "--triples", "20", "--seed", "7"};
    auto a = call(args);
    auto b = call(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.report()["rng"]["seed"], 7);
}

TEST(Cli, TricolorCsv) {
    auto r = call({"tricolor", "--f", "x + 3", "--range", "0", "6", "--samples", "10", "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "lo,hi,color\n0.0,2.0,0\n2.0,4.0,1\n4.0,6.0,2\n");
    EXPECT_TRUE(json::parse(r.err)["pass"].get<bool>());
}

TEST(Cli, TricolorJsonBlocks) {
    auto r = call({"tricolor", "--f", "x + 3", "--range", "-12", "12", "--samples", "1000"});
    ASSERT_EQ(r.code, 0);
    auto blocks = r.report()["blocks"];
    ASSERT_EQ(blocks.size(), 12u);
    EXPECT_EQ(blocks[0]["lo"], -12.0);
    EXPECT_EQ(blocks[0]["color"], 0);
    EXPECT_EQ(blocks[11]["color"], 2);
}

TEST(Cli, QexampleDepths) {
    auto ok = call({"qexample", "--depth", "4"});
    ASSERT_EQ(ok.code, 0) << ok.out;
    EXPECT_TRUE(ok.report()["domains_disjoint"].get<bool>());

    auto shallow = call({"qexample", "--depth", "1"});
    EXPECT_EQ(shallow.code, 0);

    auto deep = call({"qexample", "--depth", "99"});
    EXPECT_EQ(deep.code, 1);
    EXPECT_EQ(deep.report()["error"]["kind"], "DepthCapExceeded");
}

TEST(Cli, Orbit3Csv) {
    auto r = call({"orbit3", "--start", "0", "0", "0", "--n", "3", "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "n,x,y,z\n0,0.0,0.0,0.0\n1,0.0,0.0,1.0\n2,0.0,0.0,2.0\n3,0.0,0.0,3.0\n");
}

TEST(Cli, Orbit3Witness) {
    auto r = call({"orbit3", "--n", "10000", "--eps", "0.01"});
    ASSERT_EQ(r.code, 0);
    auto e = r.report()["entries"][0];
    EXPECT_TRUE(e["witness"].get<bool>());
    EXPECT_LT(e["gap"].get<double>(), 0.01);
}

TEST(Cli, Orbit3NeedsTwoPoints) { EXPECT_EQ(call({"orbit3", "--n", "1"}).code, 1); }

TEST(Cli, ExpressionFileSkipsCommentsAndBlanks) {
    std::string path = temp_path("maps.txt");
    {
        std::ofstream f(path);
        f << "# maps\nx + 3\n\nx - 1\n";
    }
    auto r = call({"certify", "--f-file", path});
    std::remove(path.c_str());
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.report();
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[1]["certification"]["displacement"], "below-identity");
}

TEST(Cli, OutWritesFile) {
    std::string path = temp_path("out.json");
    auto r = call({"certify", "--f", "x + 1", "--out", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    json j = json::parse(in);
    std::remove(path.c_str());
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, BadUsage) {
    EXPECT_EQ(call({}).code, 1);
    EXPECT_EQ(call({"certify", "--bogus"}).code, 1);
    EXPECT_EQ(call({"--help"}).code, 0);
}
