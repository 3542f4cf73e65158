#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "demandcast/series.hpp"

namespace demandcast {

/// One row of a daily power-supply report extract.
struct RawRecord {
    Date date{};
    std::optional<double> max_demand_mw;

    // Parsed for provenance only; the model pipeline is univariate.
    std::optional<double> shortage_mw;
    std::optional<double> energy_met_mu;
    std::optional<double> drawal_schedule_mu;
    std::optional<double> od_ud_mu;
    std::optional<double> max_od_mw;
    std::optional<double> energy_shortage_mu;

    std::size_t row = 0;  // 1-based data row, header excluded
};

/// Reads a CSV report extract. The header must name the date and maximum-demand
/// columns and may name the six auxiliary report columns; matching ignores case,
/// spacing and punctuation. Throws InputError on a malformed header or a bad date.
std::vector<RawRecord> parse_records(std::istream& in);
std::vector<RawRecord> parse_records_file(const std::string& path);

/// Calendar-complete series spanning the earliest to latest record date.
TimeSeries assemble(std::span<const RawRecord> records);

enum class ImputationStrategy { Drop, Mean, Median, Mode, LinearInterpolation };

inline constexpr std::array<ImputationStrategy, 5> kAllStrategies{
    ImputationStrategy::Drop, ImputationStrategy::Mean, ImputationStrategy::Median, ImputationStrategy::Mode,
    ImputationStrategy::LinearInterpolation};

/// Short name used for file names and CLI flags: dropna, mean, median, mode, interp.
std::string_view short_name(ImputationStrategy strategy);
/// Descriptive dataset label, e.g. "linear-Interpolation Imputation dataset".
std::string_view dataset_label(ImputationStrategy strategy);
/// Accepts the short names plus "drop" and "interpolation".
ImputationStrategy parse_strategy(std::string_view text);

struct DatasetBundle {
    ImputationStrategy strategy{};
    std::string name;
    TimeSeries series;
    /// Real calendar date of each slot. For the drop strategy these are not
    /// consecutive because the series is compacted.
    std::vector<Date> dates;
};

DatasetBundle impute(const TimeSeries& series, ImputationStrategy strategy);

std::vector<DatasetBundle> build_all(std::span<const RawRecord> records);

/// Two-column CSV: date,max_demand_mw.
void write_bundle_csv(const DatasetBundle& bundle, std::ostream& out);

struct GapSummary {
    std::size_t calendar_days = 0;
    std::size_t observed_days = 0;
    std::vector<Date> missing_dates;
};

GapSummary summarize_gaps(const TimeSeries& series);

}  // namespace demandcast
