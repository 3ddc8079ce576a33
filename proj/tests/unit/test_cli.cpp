#include "cmcglue/spec_io.hpp"

#include "json.hpp"
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace cmcglue;

namespace {

struct Outcome
{
    int code;
    std::string out;
};

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("cmcglue_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome run(const std::string& args) const
    {
        const std::string log = path("stdout.txt");
        const std::string cmd = std::string(CMCGLUE_CLI) + " " + args + " > " + log + " 2>&1";
        const int status = std::system(cmd.c_str());
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
    }

    std::string generate(const std::string& family, const std::string& extra = "")
    {
        const std::string out = path(family + ".json");
        const Outcome r = run("generate " + family + " " + extra + " --out " + out);
        EXPECT_EQ(r.code, 0) << r.out;
        return out;
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, ValidateAcceptsGeneratedFamily)
{
    const Outcome r = run("validate " + generate("triangle_genus1"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("balanced"), std::string::npos);
}

TEST_F(Cli, ValidateNamesTheBrokenCondition)
{
    const std::string spec = path("angle.json");
    write_text_file(spec, write_graph_spec(broken_angle_fixture()));
    const Outcome r = run("validate " + spec);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("(i)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("r0"), std::string::npos);
}

TEST_F(Cli, ValidateReportsUnbalancedVertex)
{
    std::string text = write_graph_spec(star_symmetric(4));
    auto j = nlohmann::json::parse(text);
    j["rays"][0]["tau_hat"] = 1.3;
    const std::string spec = path("unbalanced.json");
    write_text_file(spec, j.dump());
    const Outcome r = run("validate " + spec);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("p0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("skipped"), std::string::npos);
}

TEST_F(Cli, MalformedSpecReportsPosition)
{
    const std::string spec = path("bad.json");
    write_text_file(spec, "{\"vertices\": [\n  {\"id\": \"a\", \"position\": [0,0,0],}\n]}");
    const Outcome r = run("validate " + spec);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
}

TEST_F(Cli, MissingFileIsAnIoError)
{
    EXPECT_EQ(run("validate " + path("absent.json")).code, 3);
}

TEST_F(Cli, BuildWritesMeshTagsAndReport)
{
    const std::string spec = generate("star", "--param 4");
    const std::string obj = path("star.obj");
    const Outcome r = run("build " + spec + " --tau 1e-3 --resolution 8 --check-embedded --out " + obj);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(obj));
    EXPECT_TRUE(fs::exists(path("star.tags.json")));
    const auto report = nlohmann::json::parse(read_text_file(path("star.report.json")));
    EXPECT_EQ(report["command"], "build");
    ASSERT_EQ(report["chart_residuals"].size(), 4u);
    for (const auto& c : report["chart_residuals"])
        EXPECT_LT(c["residual"].get<double>(), 1e-9);
    EXPECT_EQ(report["intersections"]["count"], 0);
}

TEST_F(Cli, BuildRejectsLargeTau)
{
    const Outcome r = run("build " + generate("star") + " --tau 0.3 --out " + path("x.obj"));
    EXPECT_EQ(r.code, 1) << r.out;
}

TEST_F(Cli, BuildReadsParameterFiles)
{
    const std::string spec = generate("star", "--param 4");
    write_text_file(path("d.json"), R"({"p0": [5e-6, 0, 0]})");
    write_text_file(path("z.json"), R"([{"vertex": "p0", "element": "r0", "value": [0, 2e-4, 0]}])");
    const Outcome r = run("build " + spec + " --tau 1e-3 --resolution 8 --d-file " + path("d.json") + " --zeta-file " + path("z.json") +
                      " --out " + path("s.obj"));
    EXPECT_EQ(r.code, 0) << r.out;
    write_text_file(path("big.json"), R"({"p0": [1, 0, 0]})");
    EXPECT_EQ(run("build " + spec + " --d-file " + path("big.json") + " --out " + path("t.obj")).code, 1);
}

TEST_F(Cli, DiagnoseWritesSchema)
{
    const std::string out = path("diag.json");
    const Outcome r = run("diagnose " + generate("star", "--param 4") + " --out " + out);
    EXPECT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(read_text_file(out));
    EXPECT_EQ(j["schema"], "cmcglue.diagnostics/1");
    EXPECT_TRUE(j.contains("checks"));
}

TEST_F(Cli, JacobiTransitionReport)
{
    const std::string out = path("jac.json");
    const Outcome r = run("jacobi " + generate("star") + " --region transition --out " + out);
    EXPECT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(read_text_file(out));
    EXPECT_EQ(j["schema"], "cmcglue.jacobi/1");
}

TEST_F(Cli, JacobiRejectsUnknownRegion)
{
    EXPECT_EQ(run("jacobi " + generate("star") + " --region nowhere").code, 1);
}

TEST_F(Cli, UnknownFamilyFails)
{
    EXPECT_EQ(run("generate klein_bottle").code, 1);
}
