#include <doctest.h>

#include <set>
#include <sstream>

#include "aagame/cohort.hpp"
#include "aagame/errors.hpp"
#include "aagame/synth.hpp"
#include "fixtures.hpp"

using namespace aagame;

namespace {

const char* kHeader = "triplet_id,patient_id,is_case,ca125,time_to_diagnosis_months,measurement_date,peak_001,peak_002\n";

std::string two_triplets()
{
    return std::string(kHeader)
           + "T1,P1,1,35.5,3.25,2003-05-01,10,0\n"
             "T1,C1a,0,12,3.25,2003-05-01,11,2.5\n"
             "T1,C1b,0,14,3.25,2003-05-01,9,1\n"
             "T2,C2a,0,20,7,2001-01-01,1,1\n"
             "T2,C2b,0,22,7,2001-01-01,1,1\n"
             "T2,P2,1,80,7,2001-01-01,1,1\n";
}

std::string error_of(const std::string& csv)
{
    std::istringstream in(csv);
    try {
        read_cohort(in, "test.csv");
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("reads a well-formed file")
{
    std::istringstream in(two_triplets());
    const auto c = read_cohort(in);
    REQUIRE(c.size() == 2);
    CHECK(c.num_peaks == 2);
    const auto& t1 = c.triplets[0];
    CHECK(t1.id == "T1");
    CHECK(t1.case_position == 0);
    CHECK(t1.case_patient() == "P1");
    CHECK(t1.time_to_diagnosis == 3.25);
    CHECK(format_date(t1.measurement_date) == "2003-05-01");
    CHECK(t1.samples[1].peaks[1] == 2.5);
    CHECK(c.triplets[1].case_position == 2);
}

TEST_CASE("round trip through the writer is exact")
{
    SynthConfig cfg;
    cfg.n_triplets = 40;
    cfg.n_peaks = 5;
    cfg.informative_peaks = {2, 3};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        cfg.seed = seed;
        const auto c = generate(cfg);
        std::stringstream buf;
        write_cohort(c, buf);
        CHECK(read_cohort(buf) == c);
    }
    std::istringstream in(two_triplets());
    const auto c = read_cohort(in);
    std::stringstream buf;
    write_cohort(c, buf);
    CHECK(read_cohort(buf) == c);
}

TEST_CASE("179-triplet cohort loads with its shape")
{
    SynthConfig cfg;
    const auto c = generate(cfg);
    std::stringstream buf;
    write_cohort(c, buf);
    const auto back = read_cohort(buf);
    CHECK(back.size() == 179);
    std::size_t cases = 0, controls = 0;
    for (const auto& t : back.triplets)
        for (const auto& s : t.samples)
            (s.is_case ? cases : controls) += 1;
    CHECK(cases == 179);
    CHECK(controls == 358);
}

TEST_CASE("invalid files are rejected with context")
{
    std::string csv = two_triplets();
    SUBCASE("two cases")
    {
        csv.replace(csv.find("T1,C1a,0"), 8, "T1,C1a,1");
        const auto msg = error_of(csv);
        CHECK(msg.find("T1") != std::string::npos);
        CHECK(msg.find("exactly 1 case") != std::string::npos);
    }
    SUBCASE("missing sample")
    {
        csv.erase(csv.find("T1,C1b"), csv.find("T2,C2a") - csv.find("T1,C1b"));
        CHECK(error_of(csv).find("expected 3 samples") != std::string::npos);
    }
    SUBCASE("zero CA125")
    {
        csv.replace(csv.find("T2,C2a,0,20"), 11, "T2,C2a,0,0.");
        const auto msg = error_of(csv);
        CHECK(msg.find("test.csv:5") != std::string::npos);
        CHECK(msg.find("CA125") != std::string::npos);
    }
    SUBCASE("negative CA125")
    {
        csv.replace(csv.find("T2,C2a,0,20"), 11, "T2,C2a,0,-2");
        CHECK(!error_of(csv).empty());
    }
    SUBCASE("missing column")
    {
        csv.replace(0, csv.find(','), "id");
        CHECK(error_of(csv).find("missing column triplet_id") != std::string::npos);
    }
    SUBCASE("non-contiguous rows")
    {
        csv += "T1,X,0,1,1,2001-01-01,1,1\nT1,Y,0,1,1,2001-01-01,1,1\nT1,Z,1,1,1,2001-01-01,1,1\n";
        CHECK(error_of(csv).find("not contiguous") != std::string::npos);
    }
    SUBCASE("bad date")
    {
        csv.replace(csv.find("2001-01-01"), 10, "2001-02-30");
        CHECK(error_of(csv).find("date") != std::string::npos);
    }
    SUBCASE("bad number")
    {
        csv.replace(csv.find("35.5"), 4, "3x.5");
        CHECK(error_of(csv).find("ca125") != std::string::npos);
    }
    SUBCASE("wrong field count")
    {
        csv.replace(csv.find(",0\nT1,C1a"), 2, "\n");
        CHECK(error_of(csv).find("fields") != std::string::npos);
    }
    SUBCASE("negative intensity")
    {
        csv.replace(csv.find(",11,2.5"), 7, ",11,-2.5");
        CHECK(error_of(csv).find("peak_002") != std::string::npos);
    }
}

TEST_CASE("missing file")
{
    CHECK_THROWS_AS(load_cohort("/nonexistent/cohort.csv"), DataError);
}

TEST_CASE("chronological order")
{
    Cohort c;
    c.num_peaks = 3;
    c.triplets.push_back(fixtures::make_triplet("B", "P1", {1, 2, 3}, 0, 1, "2003-05-01"));
    c.triplets.push_back(fixtures::make_triplet("A", "P2", {1, 2, 3}, 0, 1, "2001-01-01"));
    auto sorted = order_chronological(c);
    CHECK(sorted.triplets[0].id == "A");
    CHECK(sorted.triplets[1].id == "B");
    CHECK(order_chronological(sorted) == sorted);

    c.triplets[1].measurement_date = c.triplets[0].measurement_date;
    sorted = order_chronological(c);
    CHECK(sorted.triplets[0].id == "A");
}

TEST_CASE("window selection")
{
    Cohort c;
    c.num_peaks = 3;
    c.triplets.push_back(fixtures::make_triplet("T3", "P1", {1, 2, 3}, 0, 3, "2003-01-01"));
    c.triplets.push_back(fixtures::make_triplet("T7", "P2", {1, 2, 3}, 0, 7, "2003-01-01"));
    c.triplets.push_back(fixtures::make_triplet("T12", "P3", {1, 2, 3}, 0, 12, "2003-01-01"));
    auto w = select_window(c, 0, 6);
    REQUIRE(w.size() == 1);
    CHECK(w.triplets[0].id == "T3");

    SUBCASE("latest per case patient")
    {
        c.triplets.push_back(fixtures::make_triplet("T4", "P9", {1, 2, 3}, 0, 5, "2004-01-01"));
        c.triplets.push_back(fixtures::make_triplet("T5", "P9", {1, 2, 3}, 0, 4, "2004-02-01"));
        w = select_window(c, 0, 6);
        REQUIRE(w.size() == 2);
        CHECK(w.triplets[1].id == "T5");
    }
    SUBCASE("boundary convention")
    {
        CHECK(select_window(c, 1, 6).size() == 1);
        CHECK(select_window(c, 1, 6, WindowBounds::closed).size() == 2);
        CHECK(select_window(c, 7, 5).size() == 1);
        CHECK(select_window(c, 7, 5, WindowBounds::closed).size() == 2);
    }
    SUBCASE("empty window")
    {
        CHECK(select_window(c, 30, 6).empty());
    }
    CHECK_THROWS_AS(select_window(c, 0, 0), InputError);
}

TEST_CASE("windows keep one triplet per case patient")
{
    SynthConfig cfg;
    cfg.n_triplets = 400;
    cfg.seed = 9;
    const auto c = generate(cfg);
    for (int t = 0; t <= 18; ++t) {
        const auto w = select_window(c, t, 6);
        std::set<std::string> patients;
        for (const auto& tr : w.triplets) {
            CHECK(tr.time_to_diagnosis >= t);
            CHECK(tr.time_to_diagnosis < t + 6);
            patients.insert(tr.case_patient());
        }
        CHECK(patients.size() == w.size());
    }
}
