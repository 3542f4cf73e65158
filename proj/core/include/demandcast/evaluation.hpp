#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "demandcast/data_pipeline.hpp"
#include "demandcast/selection.hpp"

namespace demandcast {

/// Library version string.
std::string_view version() noexcept;

/// Mean absolute percentage error in percent: 100/n * sum |a - p| / |a|.
/// Throws InvalidArgument on empty or mismatched input and on a zero actual.
double mape(std::span<const double> actual, std::span<const double> predicted);

enum class HorizonKind { OneStep, Dynamic };

struct FitMetrics {
    double mape = 0.0;
    std::size_t n_points = 0;
    HorizonKind horizon_kind = HorizonKind::OneStep;
};
FitMetrics score(std::span<const double> actual, std::span<const double> predicted, HorizonKind kind);

struct DatasetResults {
    ImputationStrategy strategy = ImputationStrategy::Drop;
    std::string name;          // file stem, e.g. "dropna"
    std::string label;         // display label
    std::size_t length = 0;    // observations in the dataset
    RankedResults results;
    bool all_failed = false;
    std::string error;
};

struct BestModel {
    std::string dataset;  // file stem
    SarimaSpec spec;
    std::string group;
    double test_mape = 0.0;
};

struct StudyMetadata {
    std::string version;
    std::string split;
    std::uint64_t seed = 0;
    std::string candidates;  // grid names joined by '+'
};

struct StudyReport {
    std::vector<DatasetResults> datasets;
    std::optional<BestModel> best;      // global minimum test MAPE
    std::vector<BestModel> winners;     // one per dataset with a successful fit
    StudyMetadata metadata;

    /// Throws NumericalError if `best` is not the minimum over all rows.
    void check_best() const;
};

struct NamedGrid {
    std::string name;
    CandidateSet candidates;
};

struct StudyOptions {
    EvaluationOptions evaluation;
    std::vector<ImputationStrategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
};

/// Builds the imputation datasets, evaluates the union of the grids on each
/// one and ranks by test MAPE. A dataset whose fits all fail is flagged.
StudyReport run_study(std::span<const RawRecord> records, const SplitSpec& split, const std::vector<NamedGrid>& grids,
                      const StudyOptions& options = {});

/// Same, starting from already-built bundles.
StudyReport run_study(const std::vector<DatasetBundle>& bundles, const SplitSpec& split,
                      const std::vector<NamedGrid>& grids, const StudyOptions& options = {});

enum class ReportFormat { Csv, Markdown };
ReportFormat parse_report_format(std::string_view text);

/// Deterministic rendering; re-asserts the best-model invariant first.
void render_report(const StudyReport& report, ReportFormat format, std::ostream& out);

/// One dataset's ranked rows as CSV.
void render_results_csv(const DatasetResults& dataset, std::ostream& out);

/// "1,0,0" for non-seasonal specs, "(0,0,0)(6,1,3,7)" otherwise.
std::string order_label(const SarimaSpec& spec);

}  // namespace demandcast
