#include "aagame/cohort.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "aagame/errors.hpp"

namespace aagame {

namespace {

constexpr std::array<std::string_view, 6> kFixedColumns = {
    "triplet_id", "patient_id", "is_case", "ca125", "time_to_diagnosis_months", "measurement_date"};

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string peak_column(std::size_t index)
{
    std::string digits = std::to_string(index);
    if (digits.size() < 3)
        digits.insert(0, 3 - digits.size(), '0');
    return "peak_" + digits;
}

double parse_real(std::string_view text, const std::string& where, std::string_view column)
{
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw DataError(where + ": column " + std::string(column) + ": not a finite number: '"
                        + std::string(text) + "'");
    return value;
}

std::string format_real(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

struct Row {
    std::size_t line = 0;
    std::string triplet_id;
    Sample sample;
    double time_to_diagnosis = 0.0;
    Date date{};
};

Triplet assemble(const std::vector<Row>& rows, const std::string& source, std::size_t num_peaks)
{
    const auto& id = rows.front().triplet_id;
    const std::string where = source + ":" + std::to_string(rows.front().line) + ": triplet " + id;
    if (rows.size() != 3)
        throw DataError(where + ": expected 3 samples, found " + std::to_string(rows.size()));
    Triplet triplet;
    triplet.id = id;
    std::size_t cases = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        triplet.samples[i] = rows[i].sample;
        if (rows[i].sample.is_case) {
            ++cases;
            triplet.case_position = i;
            triplet.time_to_diagnosis = rows[i].time_to_diagnosis;
            triplet.measurement_date = rows[i].date;
        }
    }
    if (cases != 1)
        throw DataError(where + ": expected exactly 1 case, found " + std::to_string(cases));
    try {
        validate_triplet(triplet, num_peaks);
    } catch (const DataError& e) {
        throw DataError(source + ":" + std::to_string(rows.front().line) + ": " + e.what());
    }
    return triplet;
}

}  // namespace

Date parse_date(std::string_view text)
{
    int y = 0;
    unsigned m = 0, d = 0;
    const auto bad = [&] { return DataError("invalid ISO-8601 date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw bad();
    const auto parse = [&](std::string_view part, auto& out) {
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw bad();
    };
    parse(text.substr(0, 4), y);
    parse(text.substr(5, 2), m);
    parse(text.substr(8, 2), d);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok())
        throw bad();
    return Date{ymd};
}

std::string format_date(Date date)
{
    const std::chrono::year_month_day ymd{date};
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf.data();
}

void validate_triplet(const Triplet& triplet, std::size_t num_peaks)
{
    const std::string where = "triplet " + triplet.id;
    if (triplet.id.empty())
        throw DataError("triplet with empty id");
    if (triplet.case_position >= 3)
        throw DataError(where + ": case position out of range");
    std::size_t cases = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& s = triplet.samples[i];
        if (s.is_case) {
            ++cases;
            if (i != triplet.case_position)
                throw DataError(where + ": case flag disagrees with case position");
        }
        if (!(s.ca125 > 0.0) || !std::isfinite(s.ca125))
            throw DataError(where + ": CA125 must be positive, got " + std::to_string(s.ca125));
        if (s.peaks.size() != num_peaks)
            throw DataError(where + ": expected " + std::to_string(num_peaks) + " peaks, found "
                            + std::to_string(s.peaks.size()));
        for (std::size_t p = 0; p < s.peaks.size(); ++p)
            if (!(s.peaks[p] >= 0.0) || !std::isfinite(s.peaks[p]))
                throw DataError(where + ": " + peak_column(p + 1) + " must be a nonnegative number");
    }
    if (cases != 1)
        throw DataError(where + ": expected exactly 1 case, found " + std::to_string(cases));
    if (!(triplet.time_to_diagnosis >= 0.0))
        throw DataError(where + ": time to diagnosis must be nonnegative");
}

void validate_cohort(const Cohort& cohort)
{
    for (const auto& t : cohort.triplets)
        validate_triplet(t, cohort.num_peaks);
}

Cohort read_cohort(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line))
        throw DataError(source + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split_commas(line);
    if (header.size() < kFixedColumns.size())
        throw DataError(source + ":1: header is missing required columns");
    for (std::size_t c = 0; c < kFixedColumns.size(); ++c)
        if (header[c] != kFixedColumns[c])
            throw DataError(source + ":1: missing column " + std::string(kFixedColumns[c]) + " (found '"
                            + std::string(header[c]) + "')");
    Cohort cohort;
    cohort.num_peaks = header.size() - kFixedColumns.size();
    if (cohort.num_peaks == 0)
        throw DataError(source + ":1: no peak columns");
    for (std::size_t p = 0; p < cohort.num_peaks; ++p)
        if (header[kFixedColumns.size() + p] != peak_column(p + 1))
            throw DataError(source + ":1: expected column " + peak_column(p + 1));

    std::vector<Row> pending;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 1;
    const auto flush = [&] {
        if (pending.empty())
            return;
        if (seen.contains(pending.front().triplet_id))
            throw DataError(source + ":" + std::to_string(pending.front().line) + ": triplet "
                            + pending.front().triplet_id + ": rows are not contiguous");
        seen.emplace(pending.front().triplet_id, pending.front().line);
        cohort.triplets.push_back(assemble(pending, source, cohort.num_peaks));
        pending.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto fields = split_commas(line);
        if (fields.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found "
                            + std::to_string(fields.size()));
        Row row;
        row.line = line_no;
        row.triplet_id = std::string(fields[0]);
        if (row.triplet_id.empty())
            throw DataError(where + ": empty triplet_id");
        row.sample.patient_id = std::string(fields[1]);
        if (fields[2] == "1")
            row.sample.is_case = true;
        else if (fields[2] != "0")
            throw DataError(where + ": triplet " + row.triplet_id + ": is_case must be 0 or 1");
        row.sample.ca125 = parse_real(fields[3], where, kFixedColumns[3]);
        if (!(row.sample.ca125 > 0.0))
            throw DataError(where + ": triplet " + row.triplet_id + ": CA125 must be positive");
        row.time_to_diagnosis = parse_real(fields[4], where, kFixedColumns[4]);
        try {
            row.date = parse_date(fields[5]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        row.sample.peaks.reserve(cohort.num_peaks);
        for (std::size_t p = 0; p < cohort.num_peaks; ++p)
            row.sample.peaks.push_back(parse_real(fields[kFixedColumns.size() + p], where, header[kFixedColumns.size() + p]));

        if (!pending.empty() && pending.front().triplet_id != row.triplet_id)
            flush();
        pending.push_back(std::move(row));
    }
    flush();
    return cohort;
}

Cohort load_cohort(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    return read_cohort(in, path.string());
}

void write_cohort(const Cohort& cohort, std::ostream& out)
{
    for (std::size_t c = 0; c < kFixedColumns.size(); ++c)
        out << (c ? "," : "") << kFixedColumns[c];
    for (std::size_t p = 0; p < cohort.num_peaks; ++p)
        out << ',' << peak_column(p + 1);
    out << '\n';
    for (const auto& t : cohort.triplets) {
        const std::string ttd = format_real(t.time_to_diagnosis);
        const std::string date = format_date(t.measurement_date);
        for (const auto& s : t.samples) {
            out << t.id << ',' << s.patient_id << ',' << (s.is_case ? '1' : '0') << ',' << format_real(s.ca125)
                << ',' << ttd << ',' << date;
            for (double v : s.peaks)
                out << ',' << format_real(v);
            out << '\n';
        }
    }
}

void save_cohort(const Cohort& cohort, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    write_cohort(cohort, out);
    if (!out)
        throw DataError("failed writing " + path.string());
}

Cohort order_chronological(const Cohort& cohort)
{
    Cohort out = cohort;
    std::stable_sort(out.triplets.begin(), out.triplets.end(), [](const Triplet& a, const Triplet& b) {
        if (a.measurement_date != b.measurement_date)
            return a.measurement_date < b.measurement_date;
        return a.id < b.id;
    });
    return out;
}

Cohort select_window(const Cohort& cohort, double t, double theta, WindowBounds bounds)
{
    if (!(theta > 0.0))
        throw InputError("window length must be positive");
    const auto inside = [&](double ttd) {
        if (ttd < t)
            return false;
        return bounds == WindowBounds::closed ? ttd <= t + theta : ttd < t + theta;
    };
    // Latest measurement per case patient, ties by triplet id.
    std::map<std::string, const Triplet*, std::less<>> latest;
    for (const auto& tr : cohort.triplets) {
        if (!inside(tr.time_to_diagnosis))
            continue;
        auto [it, fresh] = latest.emplace(tr.case_patient(), &tr);
        if (fresh)
            continue;
        const Triplet* cur = it->second;
        if (tr.measurement_date > cur->measurement_date
            || (tr.measurement_date == cur->measurement_date && tr.id > cur->id))
            it->second = &tr;
    }
    Cohort out;
    out.num_peaks = cohort.num_peaks;
    out.triplets.reserve(latest.size());
    for (const auto& [patient, tr] : latest)
        out.triplets.push_back(*tr);
    return order_chronological(out);
}

}  // namespace aagame
