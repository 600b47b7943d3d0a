#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kmvar/estimators.hpp"
#include "kmvar/lifetable.hpp"
#include "kmvar/simulation.hpp"

namespace kmvar {

/// FNV-1a 64-bit digest of the raw input bytes, rendered as "fnv1a64:<hex>".
std::string input_checksum(std::string_view bytes);

/// Column order of the estimate CSV export.
inline constexpr std::string_view kEstimateColumns = "t,n,d,c,s,w,g,csum,r,ci_lo,ci_hi";

/// Estimate table as CSV. Metadata comes first as `# key=value` lines;
/// undefined values are written as `null`; reals use shortest round-trip
/// formatting.
void write_estimate_csv(std::ostream& out, const RiskTable& table, const EstimateCurve& curve,
                        std::string_view checksum);

/// {"meta": {...}, "points": [{t, n, d, c, s, w, g, csum, r, ci_lo, ci_hi}, ...]}
nlohmann::json estimate_json(const RiskTable& table, const EstimateCurve& curve,
                             std::string_view checksum);

/// {"config": {...}, "points": [...], "hazard_diagnostic": {...} | null}.
/// The worker count is not part of the output.
nlohmann::json report_json(const SimReport& report);

}  // namespace kmvar
