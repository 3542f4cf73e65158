#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "demandcast/data_pipeline.hpp"
#include "demandcast/diagnostics.hpp"
#include "demandcast/error.hpp"
#include "demandcast/estimation.hpp"
#include "demandcast/evaluation.hpp"
#include "demandcast/model_io.hpp"
#include "demandcast/selection.hpp"

namespace demandcast::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 20230531;

struct RunConfig {
    std::string input;
    std::string out_dir = ".";
    std::string split = "count:365";
    int season = 7;
    std::string grid;    // empty: command default
    std::string spec;
    std::string impute;  // empty: command default
    std::uint64_t seed = kDefaultSeed;
    std::string format = "md";
    std::size_t horizon = 30;
    std::string model;   // empty: <out-dir>/model.txt
    bool allow_nonconverged = false;
    int max_lag = 40;
    unsigned threads = 0;
    int verbosity = 0;
};

std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

fs::path out_dir(const RunConfig& cfg) {
    fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<RawRecord> load_records(const RunConfig& cfg) {
    if (cfg.input.empty()) throw InvalidArgument("--input is required");
    return parse_records_file(cfg.input);
}

std::vector<DatasetBundle> load_bundles(const RunConfig& cfg, std::string_view default_impute, bool allow_all) {
    const std::string choice = cfg.impute.empty() ? std::string(default_impute) : cfg.impute;
    const auto records = load_records(cfg);
    if (choice == "all") {
        if (!allow_all) throw InvalidArgument("--impute all is not valid for this command; pick one dataset");
        return build_all(records);
    }
    const auto strategy = parse_strategy(choice);
    return {impute(assemble(records), strategy)};
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<NamedGrid> table_grids(const std::string& text) {
    std::vector<NamedGrid> grids;
    for (const auto& name : split_list(text)) {
        if (name == "stepwise") throw InvalidArgument("the stepwise search is only available through 'search'");
        grids.push_back({name, reference_grid(parse_grid_kind(name))});
    }
    if (grids.empty()) throw InvalidArgument("--grid names no grid");
    return grids;
}

CandidateSet merge(const std::vector<NamedGrid>& grids) {
    std::vector<Candidate> all;
    for (const auto& g : grids)
        for (const auto& c : g.candidates.candidates)
            if (std::none_of(all.begin(), all.end(), [&](const Candidate& m) { return m.spec == c.spec; })) all.push_back(c);
    return CandidateSet::make(std::move(all), CandidateSource::FixedGrid);
}

FitOptions fit_options(const RunConfig& cfg) {
    FitOptions fo;
    fo.seed = cfg.seed;
    return fo;
}

EvaluationOptions eval_options(const RunConfig& cfg) {
    EvaluationOptions eo;
    eo.fit = fit_options(cfg);
    eo.threads = cfg.threads;
    return eo;
}

void warn_failures(const std::string& dataset, const RankedResults& results, std::ostream& err) {
    for (const auto& row : results.rows) {
        if (row.failed) err << "warning: " << dataset << ": " << row.spec.to_string() << " failed: " << row.error << '\n';
        else if (!row.converged) err << "warning: " << dataset << ": " << row.spec.to_string() << " did not converge\n";
    }
}

// ---- commands ----------------------------------------------------------

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    const auto records = load_records(cfg);
    const auto series = assemble(records);
    const auto gaps = summarize_gaps(series);
    const auto dir = out_dir(cfg);

    std::vector<DatasetBundle> bundles;
    const std::string choice = cfg.impute.empty() ? "all" : cfg.impute;
    if (choice == "all") {
        for (auto s : kAllStrategies) bundles.push_back(impute(series, s));
    } else {
        bundles.push_back(impute(series, parse_strategy(choice)));
    }
    for (const auto& b : bundles) {
        auto f = open_out(dir / (b.name + ".csv"));
        write_bundle_csv(b, f);
    }

    {
        auto f = open_out(dir / "gap_report.txt");
        f << "first_date=" << format_date(series.start_date()) << '\n'
          << "last_date=" << format_date(series.end_date()) << '\n'
          << "calendar_days=" << gaps.calendar_days << '\n'
          << "observed_days=" << gaps.observed_days << '\n'
          << "missing_days=" << gaps.missing_dates.size() << '\n';
        for (const auto& d : gaps.missing_dates) f << "missing=" << format_date(d) << '\n';
    }
    out << "span " << format_date(series.start_date()) << " to " << format_date(series.end_date()) << '\n'
        << "calendar days: " << gaps.calendar_days << '\n'
        << "observed days: " << gaps.observed_days << '\n'
        << "missing days: " << gaps.missing_dates.size() << '\n';
    for (const auto& b : bundles) out << "wrote " << (dir / (b.name + ".csv")).string() << '\n';
    return kOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
    const auto format = parse_report_format(cfg.format);
    const auto bundles = load_bundles(cfg, "all", true);
    const auto dir = out_dir(cfg);

    std::ostringstream csv, md;
    csv << "dataset,order,statistic,p_value,p_clamped,used_lags,n_effective,lag1_acf,over_differencing_risk\n";
    md << "| Dataset | Differencing | ADF statistic | p-value | Lags | Lag-1 ACF | Note |\n"
       << "|---|---|---|---|---|---|---|\n";
    static constexpr const char* kOrderName[] = {"levels", "first difference", "second difference"};

    for (const auto& b : bundles) {
        const auto ladder = adf_ladder(b.series);
        for (const auto& row : ladder) {
            csv << b.name << ',' << row.order << ',' << num(row.adf.statistic) << ',' << num(row.adf.p_value) << ','
                << (row.adf.p_clamped ? 1 : 0) << ',' << row.adf.used_lags << ',' << row.adf.n_effective << ','
                << num(row.lag1_acf) << ',' << (row.over_differencing_risk ? 1 : 0) << '\n';
            std::string note = row.adf.rejects_unit_root() ? "stationary at 5%" : "unit root not rejected";
            if (row.over_differencing_risk) note = "over-differencing risk";
            md << "| " << b.name << " | " << kOrderName[row.order] << " | " << fixed(row.adf.statistic, 3) << " | "
               << (row.adf.p_clamped ? "< " : "") << sci(row.adf.p_value) << " | " << row.adf.used_lags << " | "
               << fixed(row.lag1_acf, 3) << " | " << note << " |\n";
        }

        const int lags = std::min<int>(cfg.max_lag, static_cast<int>(b.series.size() / 2));
        const auto a = acf(b.series, lags);
        const auto p = pacf(b.series, lags);
        auto f = open_out(dir / ("correlogram_" + b.name + ".csv"));
        f << "lag,acf,pacf,band\n";
        for (int k = 0; k < lags; ++k)
            f << k + 1 << ',' << num(a.values[static_cast<std::size_t>(k)]) << ',' << num(p.values[static_cast<std::size_t>(k)])
              << ',' << num(a.band) << '\n';
        if (lags >= 7)
            md << "| " << b.name << " | weekly | lag-7 ACF " << fixed(a.values[6], 3) << " | | | | |\n";
    }
    {
        auto f = open_out(dir / "adf.csv");
        f << csv.str();
    }
    {
        auto f = open_out(dir / "adf.md");
        f << md.str();
    }
    out << (format == ReportFormat::Csv ? csv.str() : md.str());
    return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.spec.empty()) throw InvalidArgument("--spec is required for fit");
    const auto spec = SarimaSpec::parse(cfg.spec);
    const auto bundles = load_bundles(cfg, "interp", false);
    const auto& b = bundles.front();
    const auto data = split(b.series, SplitSpec::parse(cfg.split));
    const auto dir = out_dir(cfg);

    const auto f = fit(spec, data.train, fit_options(cfg));
    const auto lost = spec.difference_spec().lost();
    const double train_mape = mape(data.train.values().subspan(lost), f.fitted);
    ForecastOptions fo;
    fo.max_horizon = data.test.size();
    const auto fc = forecast(f, data.train, data.test.size(), fo);
    const double test_mape = mape(data.test.values(), fc.point);

    const fs::path model_path = cfg.model.empty() ? dir / "model.txt" : fs::path(cfg.model);
    write_model_file(model_path, f);

    out << "model=" << spec.to_string() << '\n'
        << "dataset=" << b.name << '\n'
        << "split=" << SplitSpec::parse(cfg.split).to_string() << '\n'
        << "train_MAPE=" << fixed(train_mape, 3) << '\n'
        << "test_MAPE=" << fixed(test_mape, 3) << '\n'
        << "AIC=" << fixed(f.aic, 3) << '\n'
        << "BIC=" << fixed(f.bic, 3) << '\n'
        << "loglik=" << fixed(f.loglik, 3) << '\n'
        << "converged=" << (f.converged ? "yes" : "no") << '\n'
        << "model_file=" << model_path.string() << '\n';
    for (const auto& w : f.warnings) err << "warning: " << w << '\n';
    if (!f.converged) {
        if (!cfg.allow_nonconverged) {
            err << "error: " << spec.to_string() << " did not converge (rerun with --allow-nonconverged to accept it)\n";
            return kNumerical;
        }
        err << "warning: " << spec.to_string() << " did not converge\n";
    }
    return kOk;
}

int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string grid = cfg.grid.empty() ? "stepwise" : cfg.grid;
    const auto bundles = load_bundles(cfg, "interp", true);
    const auto split_spec = SplitSpec::parse(cfg.split);
    const auto dir = out_dir(cfg);

    for (const auto& b : bundles) {
        if (grid == "stepwise") {
            StepwiseOptions so;
            so.season = cfg.season;
            so.evaluation = eval_options(cfg);
            const auto data = split(b.series, split_spec);
            auto results = stepwise_search(data.train, so);
            warn_failures(b.name, results, err);
            const auto* top = results.best();
            const auto scored = evaluate_candidate(data, Candidate{top->spec, "stepwise"}, so.evaluation.fit);
            for (auto& row : results.rows)
                if (row.spec == scored.spec) row.test_mape = scored.test_mape;
            auto f = open_out(dir / (b.name + "_search.csv"));
            render_results_csv(DatasetResults{b.strategy, b.name, std::string(dataset_label(b.strategy)), b.series.size(),
                                              results, false, {}},
                               f);
            out << b.name << ": selected " << top->spec.to_string() << " AIC=" << fixed(top->aic, 3)
                << " test_MAPE=" << fixed(scored.test_mape, 3) << " (" << results.rows.size() << " models evaluated)\n";
        } else {
            const auto candidates = merge(table_grids(grid));
            const auto results = evaluate_grid(b.series, split_spec, candidates, eval_options(cfg));
            warn_failures(b.name, results, err);
            DatasetResults ds{b.strategy, b.name, std::string(dataset_label(b.strategy)), b.series.size(), results, false, {}};
            auto f = open_out(dir / (b.name + "_results.csv"));
            render_results_csv(ds, f);
            const auto* top = results.best();
            out << b.name << ": best " << order_label(top->spec) << " test_MAPE=" << fixed(top->test_mape, 3) << '\n';
        }
    }
    return kOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto format = parse_report_format(cfg.format);
    const auto grids = table_grids(cfg.grid.empty() ? "arima-table,sarima-table" : cfg.grid);
    const auto bundles = load_bundles(cfg, "all", true);
    const auto dir = out_dir(cfg);

    StudyOptions so;
    so.evaluation = eval_options(cfg);
    const auto report = run_study(bundles, SplitSpec::parse(cfg.split), grids, so);

    for (const auto& ds : report.datasets) {
        if (ds.all_failed) err << "warning: " << ds.name << ": every fit failed: " << ds.error << '\n';
        warn_failures(ds.name, ds.results, err);
        auto f = open_out(dir / (ds.name + "_results.csv"));
        render_results_csv(ds, f);
    }
    std::ostringstream md, csv;
    render_report(report, ReportFormat::Markdown, md);
    render_report(report, ReportFormat::Csv, csv);
    {
        auto f = open_out(dir / "report.md");
        f << md.str();
    }
    {
        auto f = open_out(dir / "report.csv");
        f << csv.str();
    }
    out << (format == ReportFormat::Csv ? csv.str() : md.str());
    if (!report.best) {
        err << "error: no model could be fitted on any dataset\n";
        return kNumerical;
    }
    return kOk;
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out) {
    const auto dir = out_dir(cfg);
    const fs::path model_path = cfg.model.empty() ? dir / "model.txt" : fs::path(cfg.model);
    const auto model = read_model_file(model_path);
    const auto bundles = load_bundles(cfg, "interp", false);
    const auto& b = bundles.front();

    const auto fc = forecast(model, b.series, cfg.horizon);
    const Date last = b.dates.empty() ? b.series.end_date() : b.dates.back();
    auto f = open_out(dir / "forecast.csv");
    f << "date,point,lower95,upper95\n";
    for (std::size_t h = 0; h < fc.horizon(); ++h) {
        f << format_date(last + std::chrono::days{static_cast<long>(h + 1)}) << ',' << num(fc.point[h]) << ','
          << num(fc.lower[h]) << ',' << num(fc.upper[h]) << '\n';
    }
    out << "model=" << model.spec.to_string() << '\n'
        << "dataset=" << b.name << '\n'
        << "horizon=" << fc.horizon() << '\n'
        << "wrote " << (dir / "forecast.csv").string() << '\n';
    return kOk;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return kUsage;
        case ErrorKind::Input: return kInput;
        case ErrorKind::InsufficientData: return kInsufficientData;
        case ErrorKind::Numerical: return kNumerical;
    }
    return kNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Seasonal ARIMA toolkit for daily maximum-demand series", "demandcast"};
    app.set_version_flag("--version", std::string(version()));
    app.set_config("--config", "", "Read options from an INI/TOML file (flags take precedence)");
    app.fallthrough();
    app.require_subcommand(1);

    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
    app.add_option("--input", cfg.input, "Input CSV (report extract or date,max_demand_mw)");
    app.add_option("--out-dir", cfg.out_dir, "Output directory")->envname("DEMANDCAST_OUT")->capture_default_str();
    app.add_option("--split", cfg.split, "count:N | frac:F | date:YYYY-MM-DD")->capture_default_str();
    app.add_option("--season", cfg.season, "Seasonal period in days")->capture_default_str();
    app.add_option("--grid", cfg.grid, "arima-table | arima-all | sarima-table | stepwise (comma list allowed)");
    app.add_option("--spec", cfg.spec, "Model order p,d,q[,P,D,Q,s]");
    app.add_option("--impute", cfg.impute, "drop | mean | median | mode | interp | all");
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--format", cfg.format, "csv | md")->capture_default_str();
    app.add_option("--horizon", cfg.horizon, "Forecast horizon in days")->capture_default_str();
    app.add_option("--model", cfg.model, "Model file (default <out-dir>/model.txt)");
    app.add_flag("--allow-nonconverged", cfg.allow_nonconverged, "Accept a fit that did not converge");
    app.add_option("--max-lag", cfg.max_lag, "Correlogram lags")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("-v,--verbose", cfg.verbosity, "More output");

    auto* ingest = app.add_subcommand("ingest", "Parse input, write the five imputation datasets and a gap report");
    auto* diagnose = app.add_subcommand("diagnose", "ADF tests at d = 0, 1, 2 and ACF/PACF tables");
    auto* fitcmd = app.add_subcommand("fit", "Fit one model on the training part and save it");
    auto* search = app.add_subcommand("search", "Stepwise order search or fixed grid evaluation");
    auto* report = app.add_subcommand("report", "Full five-dataset comparison study");
    auto* fccmd = app.add_subcommand("forecast", "Forecast from a saved model");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    if (print_config) {
        out << app.config_to_str(true, false);
        return kOk;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(cfg, out);
        if (diagnose->parsed()) return cmd_diagnose(cfg, out);
        if (fitcmd->parsed()) return cmd_fit(cfg, out, err);
        if (search->parsed()) return cmd_search(cfg, out, err);
        if (report->parsed()) return cmd_report(cfg, out, err);
        if (fccmd->parsed()) return cmd_forecast(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.kind() == ErrorKind::InvalidArgument) err << "run 'demandcast --help' for usage\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace demandcast::cli
