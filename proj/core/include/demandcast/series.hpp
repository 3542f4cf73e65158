#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace demandcast {

using Date = std::chrono::sys_days;

/// Parses `DD/MM/YYYY` or `YYYY-MM-DD`. Throws InputError on anything else.
Date parse_date(std::string_view text);
/// ISO `YYYY-MM-DD`.
std::string format_date(Date date);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Daily series anchored at a calendar date. Slot i is dated start + i days.
/// Missing observations are explicit NaN slots; every present value is finite.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(Date start, std::vector<double> values);

    /// Convenience for synthetic data: anchors the values at 2000-01-01.
    static TimeSeries from_values(std::vector<double> values);

    Date start_date() const noexcept { return start_; }
    Date end_date() const;
    Date date_at(std::size_t index) const { return start_ + std::chrono::days{static_cast<long>(index)}; }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t index) const { return values_[index]; }

    bool is_missing(std::size_t index) const;
    std::size_t missing_count() const noexcept;
    bool has_missing() const noexcept { return missing_count() != 0; }

    /// Present values in order, skipping gaps.
    std::vector<double> observed() const;

    TimeSeries slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const TimeSeries& a, const TimeSeries& b);

private:
    Date start_{};
    std::vector<double> values_;
};

/// Regular order d, seasonal order D at period s. Seasonal differences are
/// applied first, then regular ones.
struct DifferenceSpec {
    int d = 0;
    int D = 0;
    int s = 1;

    /// Number of leading observations consumed: d + D*s.
    std::size_t lost() const noexcept { return static_cast<std::size_t>(d + D * s); }
    void validate() const;

    friend bool operator==(const DifferenceSpec&, const DifferenceSpec&) = default;
};

struct Differenced {
    TimeSeries series;
    /// The d + D*s leading values of the input; integrate() needs them.
    std::vector<double> initial_values;
};

Differenced difference(const TimeSeries& series, const DifferenceSpec& spec);

/// Inverse of difference(). The result starts d + D*s days before `differenced`.
TimeSeries integrate(const TimeSeries& differenced, const DifferenceSpec& spec,
                     std::span<const double> initial_values);

/// Coefficients of (1-B)^d (1-B^s)^D in ascending powers of B; element 0 is 1.
std::vector<double> differencing_polynomial(const DifferenceSpec& spec);

class SplitSpec {
public:
    enum class Mode { ByFraction, ByDate, ByCount };

    static SplitSpec by_fraction(double train_fraction);
    static SplitSpec by_date(Date last_train_day);
    static SplitSpec by_count(std::size_t test_length);
    static SplitSpec default_split() { return by_count(365); }

    /// Accepts `count:N`, `frac:F` or `date:YYYY-MM-DD`.
    static SplitSpec parse(std::string_view text);
    std::string to_string() const;

    Mode mode() const noexcept { return mode_; }
    double fraction() const noexcept { return fraction_; }
    Date cut_date() const noexcept { return cut_; }
    std::size_t test_length() const noexcept { return test_length_; }

    /// Number of leading observations assigned to the training segment.
    std::size_t train_size(const TimeSeries& series) const;

private:
    Mode mode_ = Mode::ByCount;
    double fraction_ = 0.0;
    Date cut_{};
    std::size_t test_length_ = 365;
};

struct TrainTest {
    TimeSeries train;
    TimeSeries test;
};

TrainTest split(const TimeSeries& series, const SplitSpec& spec);

}  // namespace demandcast
