#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aagame {

using Date = std::chrono::sys_days;

// Parses YYYY-MM-DD. Throws DataError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct Sample {
    std::string patient_id;
    double ca125 = 0.0;
    std::vector<double> peaks;  // I_1 .. I_P, stored 0-based
    bool is_case = false;

    friend bool operator==(const Sample&, const Sample&) = default;
};

// One case sample with two matched controls. Positions are 0-based here
// and 1-based in reports.
struct Triplet {
    std::string id;
    std::array<Sample, 3> samples;
    std::size_t case_position = 0;
    double time_to_diagnosis = 0.0;  // months
    Date measurement_date{};

    const Sample& case_sample() const { return samples[case_position]; }
    const std::string& case_patient() const { return case_sample().patient_id; }

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct Cohort {
    std::size_t num_peaks = 0;
    std::vector<Triplet> triplets;

    std::size_t size() const noexcept { return triplets.size(); }
    bool empty() const noexcept { return triplets.empty(); }

    friend bool operator==(const Cohort&, const Cohort&) = default;
};

// Throws DataError naming the triplet when an invariant is violated.
void validate_triplet(const Triplet& triplet, std::size_t num_peaks);
void validate_cohort(const Cohort& cohort);

// CSV schema: triplet_id, patient_id, is_case, ca125,
// time_to_diagnosis_months, measurement_date, peak_001 .. peak_NNN.
// One row per sample, three contiguous rows per triplet.
Cohort read_cohort(std::istream& in, const std::string& source = "<stream>");
Cohort load_cohort(const std::filesystem::path& path);
void write_cohort(const Cohort& cohort, std::ostream& out);
void save_cohort(const Cohort& cohort, const std::filesystem::path& path);

// Ascending by measurement date, ties by triplet id.
Cohort order_chronological(const Cohort& cohort);

enum class WindowBounds {
    half_open,  // [t, t + theta)
    closed,     // [t, t + theta]
};

// Triplets whose time to diagnosis falls in the window, keeping only the
// latest-measured triplet of each case patient. Result is chronological.
Cohort select_window(const Cohort& cohort, double t, double theta,
                     WindowBounds bounds = WindowBounds::half_open);

}  // namespace aagame
