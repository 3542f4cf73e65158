#include "demandcast/data_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "demandcast/error.hpp"

namespace demandcast {

namespace {

enum class Column {
    Date,
    MaxDemand,
    Shortage,
    EnergyMet,
    DrawalSchedule,
    OdUd,
    MaxOd,
    EnergyShortage,
};

// Lower-case alphanumerics only, so "Max.Demand met during the day (MW)" and
// "max_demand_mw" reduce to comparable keys.
std::string normalize(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::optional<Column> classify(std::string_view header) {
    const auto key = normalize(header);
    if (key.rfind("date", 0) == 0) return Column::Date;
    if (key == "maxdemandmetduringthedaymw" || key == "maxdemandmw" || key == "maxdemand") return Column::MaxDemand;
    if (key.rfind("shortageduringmaximumdemand", 0) == 0) return Column::Shortage;
    if (key.rfind("energymet", 0) == 0) return Column::EnergyMet;
    if (key.rfind("drawalschedule", 0) == 0) return Column::DrawalSchedule;
    if (key.rfind("odud", 0) == 0) return Column::OdUd;
    if (key.rfind("maxod", 0) == 0) return Column::MaxOd;
    if (key.rfind("energyshortage", 0) == 0) return Column::EnergyShortage;
    return std::nullopt;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::optional<double> parse_number(std::string_view raw) {
    std::string text;
    for (char c : raw) {
        if (c != ' ' && c != '\t' && c != ',') text.push_back(c);
    }
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; });
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Most frequent exact value; ties go to the smallest value.
double mode_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double best = v.front();
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (j - i > best_count) {
            best_count = j - i;
            best = v[i];
        }
        i = j;
    }
    return best;
}

}  // namespace

std::vector<RawRecord> parse_records(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty input: missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

    const auto headers = split_csv_line(line);
    std::vector<std::optional<Column>> layout;
    bool have_date = false, have_demand = false;
    for (const auto& h : headers) {
        if (normalize(h).empty()) {
            layout.push_back(std::nullopt);
            continue;
        }
        const auto col = classify(h);
        if (!col) throw InputError("malformed header: unrecognized column '" + h + "'");
        if (std::find(layout.begin(), layout.end(), col) != layout.end())
            throw InputError("malformed header: duplicate column '" + h + "'");
        have_date |= *col == Column::Date;
        have_demand |= *col == Column::MaxDemand;
        layout.push_back(col);
    }
    if (!have_date || !have_demand) throw InputError("malformed header: need a date column and a maximum-demand column");

    std::vector<RawRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        ++row;
        const auto cells = split_csv_line(line);
        RawRecord rec;
        rec.row = row;
        bool dated = false;
        for (std::size_t i = 0; i < layout.size(); ++i) {
            if (!layout[i]) continue;
            const std::string_view cell = i < cells.size() ? std::string_view(cells[i]) : std::string_view{};
            switch (*layout[i]) {
                case Column::Date:
                    try {
                        rec.date = parse_date(cell);
                        dated = true;
                    } catch (const InputError& e) {
                        throw InputError("row " + std::to_string(row) + ": " + e.what());
                    }
                    break;
                case Column::MaxDemand: {
                    auto v = parse_number(cell);
                    if (v && *v > 0.0) rec.max_demand_mw = v;
                    break;
                }
                case Column::Shortage: rec.shortage_mw = parse_number(cell); break;
                case Column::EnergyMet: rec.energy_met_mu = parse_number(cell); break;
                case Column::DrawalSchedule: rec.drawal_schedule_mu = parse_number(cell); break;
                case Column::OdUd: rec.od_ud_mu = parse_number(cell); break;
                case Column::MaxOd: rec.max_od_mw = parse_number(cell); break;
                case Column::EnergyShortage: rec.energy_shortage_mu = parse_number(cell); break;
            }
        }
        if (!dated) throw InputError("row " + std::to_string(row) + ": missing date");
        records.push_back(rec);
    }
    return records;
}

std::vector<RawRecord> parse_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    try {
        return parse_records(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

TimeSeries assemble(std::span<const RawRecord> records) {
    if (records.empty()) throw InsufficientData("no records to assemble");
    std::map<Date, const RawRecord*> by_date;
    for (const auto& r : records) {
        auto [it, inserted] = by_date.emplace(r.date, &r);
        if (!inserted)
            throw InputError("duplicate date " + format_date(r.date) + " at rows " + std::to_string(it->second->row) +
                             " and " + std::to_string(r.row));
    }
    const bool any_present =
        std::any_of(records.begin(), records.end(), [](const RawRecord& r) { return r.max_demand_mw.has_value(); });
    if (!any_present) throw InsufficientData("no record carries a maximum-demand value");

    const Date first = by_date.begin()->first;
    const Date last = by_date.rbegin()->first;
    std::vector<double> values(static_cast<std::size_t>((last - first).count()) + 1, kMissing);
    for (const auto& [date, rec] : by_date) {
        if (rec->max_demand_mw) values[static_cast<std::size_t>((date - first).count())] = *rec->max_demand_mw;
    }
    return TimeSeries(first, std::move(values));
}

std::string_view short_name(ImputationStrategy strategy) {
    switch (strategy) {
        case ImputationStrategy::Drop: return "dropna";
        case ImputationStrategy::Mean: return "mean";
        case ImputationStrategy::Median: return "median";
        case ImputationStrategy::Mode: return "mode";
        case ImputationStrategy::LinearInterpolation: return "interp";
    }
    return "unknown";
}

std::string_view dataset_label(ImputationStrategy strategy) {
    switch (strategy) {
        case ImputationStrategy::Drop: return "dropna-dataset";
        case ImputationStrategy::Mean: return "mean Imputation dataset";
        case ImputationStrategy::Median: return "median Imputation dataset";
        case ImputationStrategy::Mode: return "mode Imputation dataset";
        case ImputationStrategy::LinearInterpolation: return "linear-Interpolation Imputation dataset";
    }
    return "unknown";
}

ImputationStrategy parse_strategy(std::string_view text) {
    if (text == "drop" || text == "dropna") return ImputationStrategy::Drop;
    if (text == "mean") return ImputationStrategy::Mean;
    if (text == "median") return ImputationStrategy::Median;
    if (text == "mode") return ImputationStrategy::Mode;
    if (text == "interp" || text == "interpolation") return ImputationStrategy::LinearInterpolation;
    throw InvalidArgument("unknown imputation strategy '" + std::string(text) + "'");
}

DatasetBundle impute(const TimeSeries& series, ImputationStrategy strategy) {
    const auto present = series.observed();
    if (present.size() < 2)
        throw InsufficientData("imputation needs at least two observed values, got " + std::to_string(present.size()));

    DatasetBundle bundle;
    bundle.strategy = strategy;
    bundle.name = std::string(short_name(strategy));
    const std::size_t n = series.size();

    if (strategy == ImputationStrategy::Drop) {
        std::size_t first = 0;
        while (series.is_missing(first)) ++first;
        for (std::size_t i = 0; i < n; ++i) {
            if (!series.is_missing(i)) bundle.dates.push_back(series.date_at(i));
        }
        bundle.series = TimeSeries(series.date_at(first), present);
        return bundle;
    }

    std::vector<double> values(series.values().begin(), series.values().end());
    for (std::size_t i = 0; i < n; ++i) bundle.dates.push_back(series.date_at(i));

    if (strategy == ImputationStrategy::LinearInterpolation) {
        std::vector<std::size_t> known;
        for (std::size_t i = 0; i < n; ++i) {
            if (!series.is_missing(i)) known.push_back(i);
        }
        for (std::size_t i = 0; i < known.front(); ++i) values[i] = values[known.front()];
        for (std::size_t i = known.back() + 1; i < n; ++i) values[i] = values[known.back()];
        for (std::size_t k = 0; k + 1 < known.size(); ++k) {
            const std::size_t a = known[k], b = known[k + 1];
            const double ya = values[a], yb = values[b];
            for (std::size_t i = a + 1; i < b; ++i) {
                const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
                values[i] = ya + w * (yb - ya);
            }
        }
    } else {
        double fill = 0.0;
        switch (strategy) {
            case ImputationStrategy::Mean: {
                double sum = 0.0;
                for (double v : present) sum += v;
                fill = sum / static_cast<double>(present.size());
                break;
            }
            case ImputationStrategy::Median: fill = median_of(present); break;
            case ImputationStrategy::Mode: fill = mode_of(present); break;
            default: break;
        }
        for (auto& v : values) {
            if (std::isnan(v)) v = fill;
        }
    }
    bundle.series = TimeSeries(series.start_date(), std::move(values));
    return bundle;
}

std::vector<DatasetBundle> build_all(std::span<const RawRecord> records) {
    const auto series = assemble(records);
    std::vector<DatasetBundle> bundles;
    bundles.reserve(kAllStrategies.size());
    for (auto strategy : kAllStrategies) bundles.push_back(impute(series, strategy));
    return bundles;
}

void write_bundle_csv(const DatasetBundle& bundle, std::ostream& out) {
    out << "date,max_demand_mw\n";
    char buf[64];
    for (std::size_t i = 0; i < bundle.series.size(); ++i) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, bundle.series[i]);
        out << format_date(bundle.dates[i]) << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
    }
}

GapSummary summarize_gaps(const TimeSeries& series) {
    GapSummary g;
    g.calendar_days = series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.is_missing(i))
            g.missing_dates.push_back(series.date_at(i));
        else
            ++g.observed_days;
    }
    return g;
}

}  // namespace demandcast
