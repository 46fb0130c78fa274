#pragma once

#include <array>
#include <string>
#include <vector>

#include "aagame/cohort.hpp"

namespace fixtures {

inline aagame::Triplet make_triplet(const std::string& id, const std::string& patient, std::array<double, 3> ca125,
                                    std::size_t case_position, double ttd, const std::string& date,
                                    std::size_t num_peaks = 3, std::array<std::vector<double>, 3> peaks = {})
{
    aagame::Triplet t;
    t.id = id;
    t.case_position = case_position;
    t.time_to_diagnosis = ttd;
    t.measurement_date = aagame::parse_date(date);
    for (std::size_t i = 0; i < 3; ++i) {
        auto& s = t.samples[i];
        s.patient_id = i == case_position ? patient : id + "-c" + std::to_string(i);
        s.is_case = i == case_position;
        s.ca125 = ca125[i];
        s.peaks = peaks[i].empty() ? std::vector<double>(num_peaks, 1.0) : peaks[i];
    }
    return t;
}

}  // namespace fixtures
