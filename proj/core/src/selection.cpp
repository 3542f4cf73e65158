#include "demandcast/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "demandcast/diagnostics.hpp"
#include "demandcast/evaluation.hpp"
#include "demandcast/polynomial.hpp"
#include "parallel.hpp"

namespace demandcast {

std::string_view to_string(CandidateSource source) {
    switch (source) {
        case CandidateSource::FixedGrid: return "fixed-grid";
        case CandidateSource::Stepwise: return "stepwise";
        case CandidateSource::Explicit: return "explicit";
    }
    return "explicit";
}

std::string_view to_string(GridKind kind) {
    switch (kind) {
        case GridKind::ArimaTable: return "arima-table";
        case GridKind::ArimaAllTables: return "arima-all";
        case GridKind::SarimaTable: return "sarima-table";
    }
    return "arima-table";
}

GridKind parse_grid_kind(std::string_view text) {
    if (text == "arima-table") return GridKind::ArimaTable;
    if (text == "arima-all") return GridKind::ArimaAllTables;
    if (text == "sarima-table") return GridKind::SarimaTable;
    throw InvalidArgument("unknown grid '" + std::string(text) + "'");
}

std::string_view to_string(RankingKey key) {
    switch (key) {
        case RankingKey::TestMape: return "test_MAPE";
        case RankingKey::Aic: return "AIC";
        case RankingKey::Bic: return "BIC";
    }
    return "test_MAPE";
}

CandidateSet CandidateSet::make(std::vector<Candidate> candidates, CandidateSource source, int state_cap) {
    if (candidates.empty()) throw InvalidArgument("candidate set is empty");
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].spec = candidates[i].spec.normalized();
        candidates[i].spec.validate(state_cap);
        for (std::size_t j = 0; j < i; ++j) {
            if (candidates[j].spec == candidates[i].spec)
                throw InvalidArgument("duplicate candidate " + candidates[i].spec.to_string());
        }
    }
    CandidateSet set;
    set.candidates = std::move(candidates);
    set.source = source;
    return set;
}

CandidateSet reference_grid(GridKind kind) {
    struct Order {
        int p, d, q;
    };
    std::vector<Candidate> out;
    auto add_arima = [&](std::initializer_list<Order> orders, const char* group) {
        for (auto o : orders) out.push_back({SarimaSpec::arima(o.p, o.d, o.q), group});
    };
    static constexpr std::initializer_list<Order> kArMa = {{1, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 2, 0},
                                                          {0, 0, 1}, {0, 1, 1}, {0, 2, 1}};
    switch (kind) {
        case GridKind::ArimaTable:
            add_arima(kArMa, "AR/MA models");
            add_arima({{8, 0, 8}, {8, 1, 8}, {9, 0, 7}, {9, 1, 7}, {8, 0, 9}, {8, 1, 9}}, "ARMA models");
            add_arima({{5, 1, 3}}, "auto-arima");
            break;
        case GridKind::ArimaAllTables:
            add_arima(kArMa, "AR/MA models");
            add_arima({{8, 0, 8}, {8, 1, 8}, {9, 0, 7}, {9, 1, 7}, {8, 0, 9}, {8, 1, 9}, {9, 0, 8}, {9, 1, 8},
                       {9, 0, 9}, {9, 1, 9}},
                      "ARMA models");
            add_arima({{5, 1, 3}, {3, 1, 4}, {5, 1, 4}}, "auto-arima");
            break;
        case GridKind::SarimaTable: {
            struct Seasonal {
                int p, P, D, Q;
            };
            static constexpr Seasonal kRows[] = {
                {1, 3, 0, 6}, {0, 1, 0, 1}, {0, 1, 1, 1}, {0, 3, 0, 6}, {0, 3, 1, 6}, {1, 6, 0, 2},
                {0, 6, 0, 2}, {0, 6, 1, 2}, {1, 6, 0, 3}, {0, 6, 0, 3}, {0, 6, 1, 3},
            };
            for (auto r : kRows) out.push_back({SarimaSpec::seasonal(r.p, 0, 0, r.P, r.D, r.Q, 7), "SARIMA"});
            break;
        }
    }
    return CandidateSet::make(std::move(out), CandidateSource::FixedGrid);
}

namespace {

double key_value(const RankedRow& row, RankingKey key) {
    switch (key) {
        case RankingKey::TestMape: return row.test_mape;
        case RankingKey::Aic: return row.aic;
        case RankingKey::Bic: return row.bic;
    }
    return row.test_mape;
}

bool usable(const RankedRow& row, RankingKey key) { return !row.failed && std::isfinite(key_value(row, key)); }

}  // namespace

void RankedResults::rank(RankingKey key) {
    ranking_key = key;
    std::stable_sort(rows.begin(), rows.end(), [key](const RankedRow& a, const RankedRow& b) {
        const bool ua = usable(a, key), ub = usable(b, key);
        if (ua != ub) return ua;
        if (!ua) return false;
        return key_value(a, key) < key_value(b, key);
    });
}

const RankedRow* RankedResults::best() const {
    if (rows.empty() || !usable(rows.front(), ranking_key)) return nullptr;
    return &rows.front();
}

RankedRow evaluate_candidate(const TrainTest& data, const Candidate& candidate, const FitOptions& options) {
    RankedRow row;
    row.spec = candidate.spec;
    row.group = candidate.group;
    try {
        const auto f = fit(candidate.spec, data.train, options);
        row.loglik = f.loglik;
        row.aic = f.aic;
        row.bic = f.bic;
        row.converged = f.converged;
        const auto poly = expand_polynomials(f.spec, f.params);
        std::vector<double> ma_as_ar(poly.ma);
        for (auto& v : ma_as_ar) v = -v;
        row.near_unit_root = poly::max_inverse_root(poly.ar) > kNearUnitRoot || poly::max_inverse_root(ma_as_ar) > kNearUnitRoot;
        const auto lost = candidate.spec.difference_spec().lost();
        row.train_mape = mape(data.train.values().subspan(lost), f.fitted);
        if (data.test.size() > 0) {
            ForecastOptions fo;
            fo.max_horizon = data.test.size();
            const auto fc = forecast(f, data.train, data.test.size(), fo);
            row.test_mape = mape(data.test.values(), fc.point);
        }
    } catch (const Error& e) {
        row.failed = true;
        row.error_kind = e.kind();
        row.error = e.what();
    } catch (const std::exception& e) {
        row.failed = true;
        row.error_kind = ErrorKind::Numerical;
        row.error = e.what();
    }
    return row;
}

RankedResults evaluate_grid(const TimeSeries& series, const SplitSpec& split_spec, const CandidateSet& candidates,
                            const EvaluationOptions& options) {
    if (candidates.candidates.empty()) throw InvalidArgument("candidate set is empty");
    if (series.has_missing()) throw InvalidArgument("grid evaluation needs a gap-free series");
    const auto data = split(series, split_spec);

    RankedResults out;
    out.rows.resize(candidates.size());
    detail::parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
        out.rows[i] = evaluate_candidate(data, candidates.candidates[i], options.fit);
    });
    const auto ok = std::find_if(out.rows.begin(), out.rows.end(), [](const RankedRow& r) { return !r.failed; });
    if (ok == out.rows.end()) throw_error(out.rows.front().error_kind, "every candidate failed; first error: " + out.rows.front().error);
    out.rank(RankingKey::TestMape);
    return out;
}

RankedResults stepwise_search(const TimeSeries& series, const StepwiseOptions& options) {
    if (series.has_missing()) throw InvalidArgument("stepwise search needs a gap-free series");
    if (options.max_p < 1 || options.max_q < 1) throw InvalidArgument("order caps must be at least 1");
    const bool seasonal = options.season >= 2;
    if (seasonal && (options.max_P < 1 || options.max_Q < 1)) throw InvalidArgument("seasonal order caps must be at least 1");
    if (options.D < 0 || options.D > 1) throw InvalidArgument("seasonal differencing order must be 0 or 1");
    if (options.D > 0 && !seasonal) throw InvalidArgument("seasonal differencing needs a period of at least 2");

    // d from repeated ADF tests on the (seasonally differenced) series.
    const TimeSeries base =
        options.D > 0 ? difference(series, DifferenceSpec{0, options.D, options.season}).series : series;
    int d = 2;
    if (base.size() < 50) throw InsufficientData("stepwise search needs at least 50 observations");
    try {
        d = recommend_differencing(base).spec.d;
    } catch (const InsufficientData&) {
        d = 2;
    }

    auto make = [&](int p, int q, int P, int Q) {
        return seasonal ? SarimaSpec::seasonal(p, d, q, P, options.D, Q, options.season) : SarimaSpec::arima(p, d, q);
    };
    auto in_caps = [&](int p, int q, int P, int Q) {
        return p >= 0 && q >= 0 && P >= 0 && Q >= 0 && p <= options.max_p && q <= options.max_q &&
               (seasonal ? (P <= options.max_P && Q <= options.max_Q) : (P == 0 && Q == 0));
    };

    const TrainTest data{series, TimeSeries{}};
    RankedResults out;
    std::set<std::tuple<int, int, int, int>> seen;

    // Fits the not-yet-seen specs of a batch; returns the indices of the new rows.
    auto run = [&](const std::vector<std::tuple<int, int, int, int>>& batch) {
        std::vector<Candidate> todo;
        for (const auto& o : batch) {
            auto [p, q, P, Q] = o;
            if (!in_caps(p, q, P, Q) || seen.count(o)) continue;
            if (seen.size() >= options.max_models) break;
            seen.insert(o);
            todo.push_back({make(p, q, P, Q), "stepwise"});
        }
        const std::size_t first = out.rows.size();
        out.rows.resize(first + todo.size());
        detail::parallel_for(todo.size(), options.evaluation.threads, [&](std::size_t i) {
            out.rows[first + i] = evaluate_candidate(data, todo[i], options.evaluation.fit);
        });
        return std::pair{first, out.rows.size()};
    };
    auto best_in = [&](std::size_t from, std::size_t to) {
        std::size_t best = to;
        for (std::size_t i = from; i < to; ++i) {
            if (!usable(out.rows[i], RankingKey::Aic) || out.rows[i].near_unit_root) continue;
            if (best == to || out.rows[i].aic < out.rows[best].aic) best = i;
        }
        return best;
    };

    auto clamp_start = [&](int p, int q, int P, int Q) {
        return std::tuple{std::min(p, options.max_p), std::min(q, options.max_q), seasonal ? std::min(P, options.max_P) : 0,
                          seasonal ? std::min(Q, options.max_Q) : 0};
    };
    auto [s0, s1] = run({clamp_start(2, 2, 1, 1), clamp_start(0, 0, 0, 0), clamp_start(1, 0, 1, 0),
                         clamp_start(0, 1, 0, 1)});
    std::size_t best = best_in(s0, s1);
    if (best == s1) throw_error(out.rows.front().error_kind, "stepwise search: no starting model could be fitted");

    while (seen.size() < options.max_models) {
        const auto& b = out.rows[best].spec;
        const int p = b.p, q = b.q, P = b.P, Q = b.Q;
        std::vector<std::tuple<int, int, int, int>> moves;
        for (int delta : {-1, 1}) {
            moves.emplace_back(p + delta, q, P, Q);
            moves.emplace_back(p, q + delta, P, Q);
        }
        for (int dp : {-1, 1})
            for (int dq : {-1, 1}) moves.emplace_back(p + dp, q + dq, P, Q);
        if (seasonal) {
            for (int delta : {-1, 1}) {
                moves.emplace_back(p, q, P + delta, Q);
                moves.emplace_back(p, q, P, Q + delta);
            }
            for (int dP : {-1, 1})
                for (int dQ : {-1, 1}) moves.emplace_back(p, q, P + dP, Q + dQ);
        }
        auto [from, to] = run(moves);
        const std::size_t cand = best_in(from, to);
        if (cand == to || !(out.rows[cand].aic < out.rows[best].aic)) break;
        best = cand;
    }

    out.rank(RankingKey::Aic);
    // Near-unit-root rows go after the admissible ones, so the search result leads.
    std::stable_partition(out.rows.begin(), out.rows.end(), [](const RankedRow& r) { return !r.near_unit_root; });
    return out;
}

}  // namespace demandcast
