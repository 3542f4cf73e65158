#include "demandcast/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "demandcast/error.hpp"

namespace demandcast {

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '"' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

std::vector<double> diff_once(std::span<const double> x, std::size_t lag) {
    std::vector<double> out;
    if (x.size() <= lag) return out;
    out.reserve(x.size() - lag);
    for (std::size_t t = lag; t < x.size(); ++t) out.push_back(x[t] - x[t - lag]);
    return out;
}

std::vector<std::size_t> stage_lags(const DifferenceSpec& spec) {
    std::vector<std::size_t> lags(static_cast<std::size_t>(spec.D), static_cast<std::size_t>(spec.s));
    lags.insert(lags.end(), static_cast<std::size_t>(spec.d), 1);
    return lags;
}

}  // namespace

Date parse_date(std::string_view raw) {
    const auto text = trim(raw);
    int y = 0, m = 0, d = 0;
    bool ok = false;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        ok = parse_int(text.substr(0, 4), y) && parse_int(text.substr(5, 2), m) && parse_int(text.substr(8, 2), d);
    } else if (auto a = text.find('/'); a != std::string_view::npos) {
        auto b = text.find('/', a + 1);
        if (b != std::string_view::npos) {
            ok = parse_int(text.substr(0, a), d) && parse_int(text.substr(a + 1, b - a - 1), m) &&
                 parse_int(text.substr(b + 1), y) && text.size() - b - 1 == 4;
        }
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ok || m < 1 || d < 1 || !ymd.ok()) throw InputError("unparseable date '" + std::string(text) + "'");
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

TimeSeries::TimeSeries(Date start, std::vector<double> values) : start_(start), values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (std::isinf(values_[i]))
            throw InvalidArgument("time series value at slot " + std::to_string(i) + " is infinite");
    }
}

TimeSeries TimeSeries::from_values(std::vector<double> values) {
    return TimeSeries(Date{std::chrono::year{2000} / 1 / 1}, std::move(values));
}

Date TimeSeries::end_date() const {
    if (values_.empty()) return start_;
    return date_at(values_.size() - 1);
}

bool TimeSeries::is_missing(std::size_t index) const { return std::isnan(values_.at(index)); }

std::size_t TimeSeries::missing_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return std::isnan(v); }));
}

std::vector<double> TimeSeries::observed() const {
    std::vector<double> out;
    out.reserve(values_.size());
    std::copy_if(values_.begin(), values_.end(), std::back_inserter(out), [](double v) { return !std::isnan(v); });
    return out;
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first > values_.size() || count > values_.size() - first)
        throw InvalidArgument("slice out of range");
    return TimeSeries(date_at(first), std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                                           values_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

bool operator==(const TimeSeries& a, const TimeSeries& b) {
    if (a.start_ != b.start_ || a.values_.size() != b.values_.size()) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double x = a.values_[i], y = b.values_[i];
        if (std::isnan(x) != std::isnan(y)) return false;
        if (!std::isnan(x) && x != y) return false;
    }
    return true;
}

void DifferenceSpec::validate() const {
    if (d < 0 || d > 2) throw InvalidArgument("regular differencing order must be in [0, 2]");
    if (D < 0 || D > 1) throw InvalidArgument("seasonal differencing order must be in [0, 1]");
    if (s < 1) throw InvalidArgument("seasonal period must be at least 1");
    if (D > 0 && s < 2) throw InvalidArgument("seasonal differencing needs a period of at least 2");
}

Differenced difference(const TimeSeries& series, const DifferenceSpec& spec) {
    spec.validate();
    if (series.has_missing()) throw InvalidArgument("cannot difference a series with missing values");
    const std::size_t lost = spec.lost();
    if (series.size() <= lost)
        throw InsufficientData("series of length " + std::to_string(series.size()) + " too short to difference away " +
                               std::to_string(lost) + " observations");

    std::vector<double> current(series.values().begin(), series.values().end());
    for (auto lag : stage_lags(spec)) current = diff_once(current, lag);

    Differenced out;
    out.initial_values.assign(series.values().begin(), series.values().begin() + static_cast<std::ptrdiff_t>(lost));
    out.series = TimeSeries(series.date_at(lost), std::move(current));
    return out;
}

TimeSeries integrate(const TimeSeries& differenced, const DifferenceSpec& spec, std::span<const double> initial_values) {
    spec.validate();
    const std::size_t lost = spec.lost();
    if (initial_values.size() != lost)
        throw InvalidArgument("integration needs " + std::to_string(lost) + " initial values, got " +
                              std::to_string(initial_values.size()));
    if (differenced.has_missing()) throw InvalidArgument("cannot integrate a series with missing values");

    // Leading values of every intermediate stage, derived from the original prefix.
    const auto lags = stage_lags(spec);
    std::vector<std::vector<double>> prefixes{std::vector<double>(initial_values.begin(), initial_values.end())};
    for (std::size_t k = 0; k + 1 < lags.size(); ++k) prefixes.push_back(diff_once(prefixes.back(), lags[k]));

    std::vector<double> current(differenced.values().begin(), differenced.values().end());
    for (std::size_t k = lags.size(); k-- > 0;) {
        const std::size_t lag = lags[k];
        std::vector<double> up(prefixes[k].begin(), prefixes[k].begin() + static_cast<std::ptrdiff_t>(lag));
        up.reserve(lag + current.size());
        for (std::size_t t = 0; t < current.size(); ++t) up.push_back(current[t] + up[t]);
        current = std::move(up);
    }
    const Date start = differenced.start_date() - std::chrono::days{static_cast<long>(lost)};
    return TimeSeries(start, std::move(current));
}

std::vector<double> differencing_polynomial(const DifferenceSpec& spec) {
    spec.validate();
    std::vector<double> poly{1.0};
    for (auto lag : stage_lags(spec)) {
        std::vector<double> next(poly.size() + lag, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + lag] -= poly[i];
        }
        poly = std::move(next);
    }
    return poly;
}

SplitSpec SplitSpec::by_fraction(double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("split fraction must lie in (0, 1)");
    SplitSpec s;
    s.mode_ = Mode::ByFraction;
    s.fraction_ = train_fraction;
    return s;
}

SplitSpec SplitSpec::by_date(Date last_train_day) {
    SplitSpec s;
    s.mode_ = Mode::ByDate;
    s.cut_ = last_train_day;
    return s;
}

SplitSpec SplitSpec::by_count(std::size_t test_length) {
    if (test_length == 0) throw InvalidArgument("test length must be positive");
    SplitSpec s;
    s.mode_ = Mode::ByCount;
    s.test_length_ = test_length;
    return s;
}

SplitSpec SplitSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InvalidArgument("split must look like count:N, frac:F or date:D");
    const auto kind = text.substr(0, colon);
    const std::string value(text.substr(colon + 1));
    if (kind == "count") {
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || ptr != value.data() + value.size()) throw InvalidArgument("bad split count '" + value + "'");
        return by_count(n);
    }
    if (kind == "frac") {
        char* end = nullptr;
        const double f = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size()) throw InvalidArgument("bad split fraction '" + value + "'");
        return by_fraction(f);
    }
    if (kind == "date") {
        try {
            return by_date(parse_date(value));
        } catch (const InputError&) {
            throw InvalidArgument("bad split date '" + value + "'");
        }
    }
    throw InvalidArgument("unknown split mode '" + std::string(kind) + "'");
}

std::string SplitSpec::to_string() const {
    switch (mode_) {
        case Mode::ByCount: return "count:" + std::to_string(test_length_);
        case Mode::ByDate: return "date:" + format_date(cut_);
        case Mode::ByFraction: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "frac:%.17g", fraction_);
            return buf;
        }
    }
    return {};
}

std::size_t SplitSpec::train_size(const TimeSeries& series) const {
    const std::size_t n = series.size();
    switch (mode_) {
        case Mode::ByCount: return test_length_ >= n ? 0 : n - test_length_;
        case Mode::ByFraction: return static_cast<std::size_t>(std::floor(fraction_ * static_cast<double>(n)));
        case Mode::ByDate: {
            if (cut_ < series.start_date()) return 0;
            const auto days = static_cast<std::size_t>((cut_ - series.start_date()).count()) + 1;
            return std::min(days, n);
        }
    }
    return 0;
}

TrainTest split(const TimeSeries& series, const SplitSpec& spec) {
    if (series.empty()) throw InsufficientData("cannot split an empty series");
    const std::size_t n_train = spec.train_size(series);
    if (n_train == 0 || n_train >= series.size())
        throw InsufficientData("split " + spec.to_string() + " leaves an empty train or test segment for a series of " +
                               std::to_string(series.size()) + " days");
    return {series.slice(0, n_train), series.slice(n_train, series.size() - n_train)};
}

}  // namespace demandcast
