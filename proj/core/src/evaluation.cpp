#include "demandcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "parallel.hpp"

namespace demandcast {

std::string_view version() noexcept { return DEMANDCAST_VERSION; }

double mape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty()) throw InvalidArgument("MAPE of an empty sequence");
    if (actual.size() != predicted.size())
        throw InvalidArgument("MAPE length mismatch: " + std::to_string(actual.size()) + " actual vs " +
                              std::to_string(predicted.size()) + " predicted");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw InvalidArgument("MAPE undefined: actual value at position " + std::to_string(i) + " is zero");
        sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

FitMetrics score(std::span<const double> actual, std::span<const double> predicted, HorizonKind kind) {
    return FitMetrics{mape(actual, predicted), actual.size(), kind};
}

std::string order_label(const SarimaSpec& spec) {
    const std::string base = std::to_string(spec.p) + "," + std::to_string(spec.d) + "," + std::to_string(spec.q);
    if (!spec.has_seasonal_terms()) return base;
    return spec.to_string();
}

void StudyReport::check_best() const {
    const RankedRow* min_row = nullptr;
    for (const auto& ds : datasets)
        for (const auto& row : ds.results.rows)
            if (!row.failed && std::isfinite(row.test_mape) && (!min_row || row.test_mape < min_row->test_mape)) min_row = &row;
    if (!min_row) {
        if (best) throw NumericalError("report names a best model but has no successful rows");
        return;
    }
    if (!best || best->test_mape > min_row->test_mape)
        throw NumericalError("report best model is not the minimum test MAPE");
}

StudyReport run_study(std::span<const RawRecord> records, const SplitSpec& split_spec, const std::vector<NamedGrid>& grids,
                      const StudyOptions& options) {
    auto all = build_all(records);
    std::vector<DatasetBundle> chosen;
    for (auto& b : all)
        if (std::find(options.strategies.begin(), options.strategies.end(), b.strategy) != options.strategies.end())
            chosen.push_back(std::move(b));
    return run_study(chosen, split_spec, grids, options);
}

StudyReport run_study(const std::vector<DatasetBundle>& bundles, const SplitSpec& split_spec,
                      const std::vector<NamedGrid>& grids, const StudyOptions& options) {
    if (bundles.empty()) throw InvalidArgument("study has no datasets");
    if (grids.empty()) throw InvalidArgument("study has no candidate grids");

    std::vector<Candidate> merged;
    std::string names;
    for (const auto& g : grids) {
        names += (names.empty() ? "" : "+") + g.name;
        for (const auto& c : g.candidates.candidates) {
            const bool dup = std::any_of(merged.begin(), merged.end(), [&](const Candidate& m) { return m.spec == c.spec; });
            if (!dup) merged.push_back(c);
        }
    }
    const auto candidates = CandidateSet::make(std::move(merged), CandidateSource::FixedGrid, options.evaluation.fit.state_cap);

    StudyReport report;
    report.metadata = StudyMetadata{std::string(version()), split_spec.to_string(), options.evaluation.fit.seed, names};
    report.datasets.resize(bundles.size());
    std::vector<TrainTest> parts(bundles.size());
    std::vector<bool> ok(bundles.size(), false);
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        auto& ds = report.datasets[i];
        ds.strategy = bundles[i].strategy;
        ds.name = bundles[i].name;
        ds.label = std::string(dataset_label(bundles[i].strategy));
        ds.length = bundles[i].series.size();
        try {
            parts[i] = split(bundles[i].series, split_spec);
            ds.results.rows.resize(candidates.size());
            ok[i] = true;
        } catch (const Error& e) {
            ds.all_failed = true;
            ds.error = e.what();
        }
    }

    // One flat job list so datasets and candidates share the worker pool.
    const std::size_t nc = candidates.size();
    detail::parallel_for(bundles.size() * nc, options.evaluation.threads, [&](std::size_t job) {
        const std::size_t di = job / nc, ci = job % nc;
        if (!ok[di]) return;
        report.datasets[di].results.rows[ci] = evaluate_candidate(parts[di], candidates.candidates[ci], options.evaluation.fit);
    });

    for (auto& ds : report.datasets) {
        if (ds.all_failed) continue;
        ds.results.rank(RankingKey::TestMape);
        const auto* top = ds.results.best();
        if (!top) {
            ds.all_failed = true;
            ds.error = ds.results.rows.empty() ? "no rows" : ds.results.rows.front().error;
            continue;
        }
        BestModel w{ds.name, top->spec, top->group, top->test_mape};
        if (!report.best || w.test_mape < report.best->test_mape) report.best = w;
        report.winners.push_back(std::move(w));
    }
    report.check_best();
    return report;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "md" || text == "markdown") return ReportFormat::Markdown;
    throw InvalidArgument("unknown report format '" + std::string(text) + "' (expected csv or md)");
}

namespace {

std::string fixed(double v, int digits) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
    out << '\n';
}

std::vector<std::string> row_cells(const RankedRow& row) {
    return {row.group,
            order_label(row.spec),
            fixed(row.test_mape, 6),
            fixed(row.train_mape, 6),
            fixed(row.aic, 6),
            fixed(row.bic, 6),
            fixed(row.loglik, 6),
            row.converged ? "1" : "0",
            row.failed ? "1" : "0",
            row.error};
}

const char* const kResultHeader[] = {"Models", "Order", "test_MAPE", "train_MAPE", "AIC", "BIC",
                                     "loglik", "converged", "failed", "error"};

void write_markdown_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(rows.front().size(), 3);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& r) {
        out << '|';
        for (std::size_t c = 0; c < r.size(); ++c) out << ' ' << r[c] << std::string(width[c] - r[c].size(), ' ') << " |";
        out << '\n';
    };
    line(rows.front());
    out << '|';
    for (auto w : width) out << std::string(w + 2, '-') << '|';
    out << '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
}

std::string describe(const BestModel& b) {
    return order_label(b.spec) + " on " + b.dataset + ", test_MAPE " + fixed(b.test_mape, 3);
}

constexpr const char* kTrainConvention = "one-step in-sample predictions on the training part";
constexpr const char* kTestConvention = "dynamic multi-step forecast over the whole test part";

}  // namespace

void render_results_csv(const DatasetResults& dataset, std::ostream& out) {
    write_row(out, {std::begin(kResultHeader), std::end(kResultHeader)});
    for (const auto& row : dataset.results.rows) write_row(out, row_cells(row));
}

void render_report(const StudyReport& report, ReportFormat format, std::ostream& out) {
    report.check_best();
    const auto& m = report.metadata;
    if (format == ReportFormat::Csv) {
        out << "# version=" << m.version << '\n'
            << "# split=" << m.split << '\n'
            << "# seed=" << m.seed << '\n'
            << "# candidates=" << m.candidates << '\n'
            << "# train_MAPE=" << kTrainConvention << '\n'
            << "# test_MAPE=" << kTestConvention << '\n';
        if (report.best) out << "# best=" << describe(*report.best) << '\n';
        std::vector<std::string> header{"dataset"};
        header.insert(header.end(), std::begin(kResultHeader), std::end(kResultHeader));
        write_row(out, header);
        for (const auto& ds : report.datasets) {
            for (const auto& row : ds.results.rows) {
                auto cells = row_cells(row);
                cells.insert(cells.begin(), ds.name);
                write_row(out, cells);
            }
        }
        return;
    }

    out << "# Model comparison report\n\n"
        << "- version: " << m.version << '\n'
        << "- split: " << m.split << '\n'
        << "- seed: " << m.seed << '\n'
        << "- candidates: " << m.candidates << '\n'
        << "- train_MAPE: " << kTrainConvention << '\n'
        << "- test_MAPE: " << kTestConvention << '\n'
        << "- best model: " << (report.best ? describe(*report.best) : std::string("none")) << "\n\n";

    if (!report.winners.empty()) {
        out << "## Per-dataset winners\n\n";
        std::vector<std::vector<std::string>> rows{{"Dataset", "Order", "test_MAPE"}};
        for (const auto& w : report.winners) rows.push_back({w.dataset, order_label(w.spec), fixed(w.test_mape, 3)});
        write_markdown_table(out, rows);
        out << '\n';
    }

    for (const auto& ds : report.datasets) {
        out << "## " << ds.label << " (" << ds.name << ", n=" << ds.length << ")\n\n";
        if (ds.all_failed) out << "All fits failed: " << ds.error << "\n\n";
        if (ds.results.rows.empty()) continue;
        std::vector<std::vector<std::string>> rows{{"Models", "Order", "test_MAPE", "train_MAPE", "AIC", "BIC"}};
        std::vector<std::string> notes;
        for (const auto& row : ds.results.rows) {
            if (row.failed) {
                rows.push_back({row.group, order_label(row.spec), "failed", "failed", "failed", "failed"});
                notes.push_back("- " + order_label(row.spec) + " failed: " + row.error);
                continue;
            }
            rows.push_back({row.group, order_label(row.spec), fixed(row.test_mape, 3), fixed(row.train_mape, 3),
                            fixed(row.aic, 3), fixed(row.bic, 3)});
            if (!row.converged) notes.push_back("- " + order_label(row.spec) + " did not converge");
        }
        write_markdown_table(out, rows);
        out << '\n';
        for (const auto& n : notes) out << n << '\n';
        if (!notes.empty()) out << '\n';
    }
}

}  // namespace demandcast
