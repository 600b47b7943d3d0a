#include "kmvar/lifetable.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "kmvar/numeric.hpp"

namespace kmvar {

namespace {

void check_record(const ObservationRecord& r, std::size_t index) {
    if (!std::isfinite(r.time)) {
        throw InvalidRecord(index, 0, "time is not finite");
    }
    if (r.time < 0.0) {
        throw InvalidRecord(index, 0, "time is negative");
    }
    if (r.status != 0 && r.status != 1) {
        throw InvalidRecord(index, 0, "status must be 0 or 1");
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

RiskTable build_risk_table(std::span<const ObservationRecord> records) {
    if (records.empty()) throw EmptyDataset();
    for (std::size_t i = 0; i < records.size(); ++i) check_record(records[i], i);

    std::vector<ObservationRecord> sorted(records.begin(), records.end());
    // Events before censorings at a tied time.
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.status > b.status;
    });

    RiskTable table;
    table.total = static_cast<std::int64_t>(sorted.size());
    std::int64_t at_risk = table.total;

    for (std::size_t i = 0; i < sorted.size();) {
        const double t = sorted[i].time;
        std::int64_t d = 0;
        std::int64_t c = 0;
        for (; i < sorted.size() && sorted[i].time == t; ++i) {
            (sorted[i].status == 1 ? d : c) += 1;
        }
        if (d > 0) {
            table.rows.push_back(RiskRow{t, at_risk, d, c});
        } else if (table.rows.empty()) {
            table.pre_first_censored += c;
        } else {
            table.rows.back().c += c;
        }
        at_risk -= d + c;
    }
    return table;
}

void validate(const RiskTable& table) {
    if (table.total <= 0) throw Error("risk table: total must be positive");
    if (table.pre_first_censored < 0 || table.pre_first_censored > table.total) {
        throw Error("risk table: pre_first_censored out of range");
    }
    std::int64_t expected_n = table.total - table.pre_first_censored;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
        const RiskRow& row = table.rows[j];
        const std::string where = "risk table row " + std::to_string(j) + ": ";
        if (j > 0 && !(table.rows[j - 1].t < row.t)) {
            throw Error(where + "times not strictly increasing");
        }
        if (row.n != expected_n) throw Error(where + "risk set does not follow count chain");
        if (row.d < 1 || row.d > row.n) throw Error(where + "requires 1 <= d <= n");
        if (row.c < 0 || row.d + row.c > row.n) throw Error(where + "censor count out of range");
        expected_n = row.n - row.d - row.c;
    }
}

std::vector<ObservationRecord> parse_observations_csv(std::string_view text) {
    std::vector<ObservationRecord> records;
    bool seen_header = false;
    std::size_t line_no = 0;

    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        line = trim(line);
        if (line.empty()) continue;

        if (!seen_header) {
            const auto comma = line.find(',');
            if (comma == std::string_view::npos || trim(line.substr(0, comma)) != "time" ||
                trim(line.substr(comma + 1)) != "status") {
                throw InvalidRecord(0, line_no, "expected header 'time,status'");
            }
            seen_header = true;
            continue;
        }

        const std::size_t index = records.size();
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw InvalidRecord(index, line_no, "expected two comma-separated fields");
        }
        const std::string_view time_field = trim(line.substr(0, comma));
        const std::string_view status_field = trim(line.substr(comma + 1));

        ObservationRecord rec;
        const char* first = time_field.data();
        const char* last = first + time_field.size();
        if (!time_field.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, rec.time);
        if (time_field.empty() || ec != std::errc{} || ptr != last) {
            throw InvalidRecord(index, line_no, "time is not a decimal number");
        }
        if (!std::isfinite(rec.time)) throw InvalidRecord(index, line_no, "time is not finite");
        if (rec.time < 0.0) throw InvalidRecord(index, line_no, "time is negative");

        if (status_field == "0") {
            rec.status = 0;
        } else if (status_field == "1") {
            rec.status = 1;
        } else {
            throw InvalidRecord(index, line_no, "status must be 0 or 1");
        }
        records.push_back(rec);
    }
    if (!seen_header) throw InvalidRecord(0, line_no == 0 ? 1 : line_no, "missing header 'time,status'");
    return records;
}

void write_observations_csv(std::ostream& out, std::span<const ObservationRecord> records) {
    out << "time,status\n";
    for (const auto& r : records) out << format_double(r.time) << ',' << r.status << '\n';
}

}  // namespace kmvar
