#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "kmvar/errors.hpp"

namespace kmvar {

/// One subject: observed time and event flag (1 = event, 0 = censored).
struct ObservationRecord {
    double time = 0.0;
    int status = 0;

    friend bool operator==(const ObservationRecord&, const ObservationRecord&) = default;
};

/// Counts at one distinct event time.
///
/// `n` is the risk set immediately before `t`, `d` the events at `t`, and `c`
/// the censorings in [t, next event time). Censorings tied with `t` stay in
/// the risk set for the event at `t`.
struct RiskRow {
    double t = 0.0;
    std::int64_t n = 0;
    std::int64_t d = 0;
    std::int64_t c = 0;

    friend bool operator==(const RiskRow&, const RiskRow&) = default;
};

struct RiskTable {
    std::vector<RiskRow> rows;
    std::int64_t total = 0;
    std::int64_t pre_first_censored = 0;

    bool empty() const noexcept { return rows.empty(); }
    std::size_t size() const noexcept { return rows.size(); }

    friend bool operator==(const RiskTable&, const RiskTable&) = default;
};

/// Aggregates raw observations into the ordered event-time risk table.
///
/// Times are grouped by exact equality. Throws EmptyDataset for an empty
/// input and InvalidRecord for negative/non-finite times or a status outside
/// {0, 1}.
RiskTable build_risk_table(std::span<const ObservationRecord> records);

/// Checks the structural invariants of a table (ordering, count chain,
/// 1 <= d <= n). Throws Error describing the first violation.
void validate(const RiskTable& table);

/// Parses `time,status` CSV text. The header line is mandatory; blank lines
/// are skipped; LF and CRLF line endings are accepted. Errors name the
/// one-based source line.
std::vector<ObservationRecord> parse_observations_csv(std::string_view text);

/// Renders records in the same `time,status` format.
void write_observations_csv(std::ostream& out, std::span<const ObservationRecord> records);

}  // namespace kmvar
