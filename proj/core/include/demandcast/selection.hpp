#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "demandcast/error.hpp"
#include "demandcast/estimation.hpp"
#include "demandcast/series.hpp"

namespace demandcast {

struct Candidate {
    SarimaSpec spec;
    std::string group;  // row-group label, e.g. "ARMA models"
};

enum class CandidateSource { FixedGrid, Stepwise, Explicit };
std::string_view to_string(CandidateSource source);

struct CandidateSet {
    std::vector<Candidate> candidates;
    CandidateSource source = CandidateSource::Explicit;

    /// Throws InvalidArgument on an empty list, duplicates, or a spec over the cap.
    static CandidateSet make(std::vector<Candidate> candidates, CandidateSource source,
                             int state_cap = kDefaultStateCap);
    std::size_t size() const noexcept { return candidates.size(); }
};

enum class GridKind {
    ArimaTable,      // the non-seasonal orders of the dropna comparison table
    ArimaAllTables,  // union of the non-seasonal orders over all five datasets
    SarimaTable,     // union of the seasonal orders over all five datasets
};
std::string_view to_string(GridKind kind);
GridKind parse_grid_kind(std::string_view text);

CandidateSet reference_grid(GridKind kind);

/// Inverse-root modulus above which stepwise search discards a model (roots
/// within 1.01 of the unit circle).
inline constexpr double kNearUnitRoot = 1.0 / 1.01;

enum class RankingKey { TestMape, Aic, Bic };
std::string_view to_string(RankingKey key);

struct RankedRow {
    SarimaSpec spec;
    std::string group;
    double train_mape = kMissing;  // percent
    double test_mape = kMissing;   // percent
    double aic = kMissing;
    double bic = kMissing;
    double loglik = kMissing;
    bool converged = false;
    /// Some AR or MA inverse root has modulus above kNearUnitRoot.
    bool near_unit_root = false;
    bool failed = false;
    ErrorKind error_kind = ErrorKind::Numerical;
    std::string error;
};

struct RankedResults {
    std::vector<RankedRow> rows;
    RankingKey ranking_key = RankingKey::TestMape;

    /// Stable sort by the key; failed rows and missing keys go last.
    void rank(RankingKey key);
    const RankedRow* best() const;
};

struct EvaluationOptions {
    FitOptions fit;
    /// 0 uses the hardware concurrency.
    unsigned threads = 0;
};

/// Fits one candidate on data.train and scores it. An empty test part leaves
/// test_mape missing. Never throws: failures are recorded on the row.
RankedRow evaluate_candidate(const TrainTest& data, const Candidate& candidate, const FitOptions& options = {});

/// Fits each candidate on the training part, then scores one-step in-sample
/// MAPE on the training data and dynamic forecast MAPE over the whole test
/// part. Fit failures are recorded on their row. Throws when every candidate
/// fails, with the error kind of the first failure.
RankedResults evaluate_grid(const TimeSeries& series, const SplitSpec& split, const CandidateSet& candidates,
                            const EvaluationOptions& options = {});

struct StepwiseOptions {
    int max_p = 5, max_q = 5;
    int max_P = 2, max_Q = 2;
    /// Seasonal period; seasonal terms are searched only when >= 2.
    int season = 1;
    int D = 0;
    std::size_t max_models = 94;
    EvaluationOptions evaluation;
};

/// Stepwise order search in the style of Hyndman and Khandakar: d from
/// repeated ADF tests, four starting models, then +-1 moves on each order
/// (and joint p/q, P/Q moves) while AIC improves. Models with a near-unit
/// AR or MA root never become the incumbent. Returns every evaluated model
/// ranked by AIC. test_mape is left missing.
RankedResults stepwise_search(const TimeSeries& series, const StepwiseOptions& options = {});

}  // namespace demandcast
