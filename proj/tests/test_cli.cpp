#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aagame/cohort.hpp"
#include "aagame/experts.hpp"
#include "commands.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "aagame");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = aagame::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("aagame_cli_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("synth is deterministic and writes three rows per triplet")
{
    TempDir dir("synth");
    REQUIRE(invoke({"synth", "--seed", "7", "--out", dir / "a.csv"}).code == 0);
    REQUIRE(invoke({"synth", "--seed", "7", "--out", dir / "b.csv"}).code == 0);
    REQUIRE(invoke({"synth", "--seed", "8", "--out", dir / "c.csv"}).code == 0);
    const auto a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a != slurp(dir / "c.csv"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 538);
    const auto cohort = aagame::load_cohort(dir / "a.csv");
    CHECK(cohort.size() == 179);
    CHECK(cohort.num_peaks == 67);
}

TEST_CASE("usage and data errors")
{
    TempDir dir("errors");
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({"synth"}).code == 2);
    CHECK(invoke({"synth", "--out", dir / "x.csv", "--frobnicate"}).code == 2);
    CHECK(invoke({"run", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"run", "--synth", "--input", dir / "x.csv", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"run", "--synth", "--prior", "power:", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"run", "--synth", "--eta", "1.5", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"windows", "--synth", "--trials", "0", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"windows", "--synth", "--grid-d", "0.5", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"pvalues", "--synth", "--t-start", "5", "--t-end", "2", "--out-dir", dir.path.string()}).code == 2);
    CHECK(invoke({"synth", "--triplets", "0", "--out", dir / "x.csv"}).code == 2);

    const auto missing = invoke({"run", "--input", dir / "missing.csv", "--out-dir", dir.path.string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("missing.csv") != std::string::npos);

    {
        std::ofstream bad(dir / "bad.csv");
        bad << "not,a,cohort\n1,2,3\n";
    }
    CHECK(invoke({"run", "--input", dir / "bad.csv", "--out-dir", dir.path.string()}).code == 1);
    CHECK(invoke({"synth", "--help"}).code == 0);
}

TEST_CASE("run emits cumulative losses relative to the AA")
{
    TempDir dir("run");
    REQUIRE(invoke({"synth", "--seed", "2", "--triplets", "60", "--peaks", "5", "--informative", "2,3",
                    "--out", dir / "c.csv"})
                .code == 0);
    REQUIRE(invoke({"run", "--input", dir / "c.csv", "--out-dir", dir / "out"}).code == 0);
    const auto rows = read_csv(dir.path / "out" / "cumulative_loss.csv");
    const auto pool = aagame::build_pool(5);
    REQUIRE(rows.size() == 61);
    REQUIRE(rows[0].size() == 3 + pool.size());
    CHECK(rows[0][0] == "step");
    CHECK(rows[0][1] == "triplet_id");
    CHECK(rows[0][2] == "aa");
    for (std::size_t k = 0; k < pool.size(); ++k)
        CHECK(rows[0][3 + k] == pool[k].label());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][0] == std::to_string(i));
        CHECK(std::stod(rows[i][2]) == 0.0);
    }
    double final_min = 1e300;
    for (std::size_t k = 3; k < rows.back().size(); ++k)
        final_min = std::min(final_min, std::stod(rows.back()[k]));
    CHECK(final_min >= -std::log(static_cast<double>(pool.size())));

    // A rerun with the same input writes the same bytes.
    REQUIRE(invoke({"run", "--input", dir / "c.csv", "--out-dir", dir / "again"}).code == 0);
    CHECK(slurp(dir.path / "out" / "cumulative_loss.csv") == slurp(dir.path / "again" / "cumulative_loss.csv"));

    REQUIRE(invoke({"run", "--input", dir / "c.csv", "--categorical", "--prior", "power:1.2", "--eta", "0.5",
                    "--out-dir", dir / "cat"})
                .code == 0);
    CHECK(read_csv(dir.path / "cat" / "cumulative_loss.csv").size() == 61);

    aagame::Cohort one{3, {fixtures::make_triplet("X1", "P1", {10, 20, 30}, 2, 4.0, "2003-05-05")}};
    aagame::save_cohort(one, dir / "one.csv");
    REQUIRE(invoke({"run", "--input", dir / "one.csv", "--out-dir", dir / "one"}).code == 0);
    CHECK(read_csv(dir.path / "one" / "cumulative_loss.csv").size() == 2);
}

TEST_CASE("windows emits the table and error fractions")
{
    TempDir dir("windows");
    const auto r = invoke({"windows", "--synth", "--seed", "4", "--peaks", "6", "--informative", "2,3", "--trials", "9", "--grid-d", "1.2",
                           "--grid-eta", "0.65", "--out-dir", dir.path.string()});
    REQUIRE(r.code == 0);
    const auto table = read_csv(dir.path / "table.csv");
    REQUIRE(table.size() == 18);
    CHECK(table[0].size() == 13);
    for (std::size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i][0] == std::to_string(i - 1));
        CHECK(table[i].size() == 13);
    }
    const auto fractions = read_csv(dir.path / "error_fractions.csv");
    CHECK(fractions.size() == 1 + 17 * 6);
    for (std::size_t i = 1; i < fractions.size(); ++i) {
        if (fractions[i][2] == "NA")
            continue;
        const double f = std::stod(fractions[i][2]);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("pvalues respect the formula floor and are reproducible")
{
    TempDir dir("pvalues");
    const std::vector<std::string> base = {"pvalues", "--synth", "--seed", "5", "--peaks", "6", "--informative", "2,3", "--trials", "49",
                                           "--grid-d", "1.2,1.6", "--grid-eta", "0.3,0.65", "--t-end", "4"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return args;
    };
    REQUIRE(invoke(with({"--out-dir", dir / "a"})).code == 0);
    REQUIRE(invoke(with({"--out-dir", dir / "b"})).code == 0);
    REQUIRE(invoke(with({"--threads", "4", "--out-dir", dir / "c"})).code == 0);
    const auto a = slurp(dir.path / "a" / "log_pvalues.csv");
    CHECK(a == slurp(dir.path / "b" / "log_pvalues.csv"));
    CHECK(a == slurp(dir.path / "c" / "log_pvalues.csv"));
    const auto rows = read_csv(dir.path / "a" / "log_pvalues.csv");
    REQUIRE(rows.size() == 1 + 5 * 5);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][2]) >= std::log10(1.0 / 50.0) - 1e-12);
}

TEST_CASE("null cohort rarely yields small p-values")
{
    TempDir dir("null");
    REQUIRE(invoke({"pvalues", "--synth", "--seed", "12", "--signal", "0", "--peaks", "10", "--trials", "100",
                    "--threads", "4", "--out-dir", dir.path.string()})
                .code == 0);
    const auto rows = read_csv(dir.path / "log_pvalues.csv");
    REQUIRE(rows.size() == 1 + 17 * 5);
    int small = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        small += std::stod(rows[i][2]) < std::log10(0.05) ? 1 : 0;
    CHECK(small < 0.1 * 17 * 5);
}
