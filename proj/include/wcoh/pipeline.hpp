#ifndef WCOH_PIPELINE_HPP
#define WCOH_PIPELINE_HPP

#include "coherence.hpp"
#include "cwt.hpp"
#include "denoise.hpp"
#include "error.hpp"
#include "grid_io.hpp"
#include "timeseries.hpp"
#include "varma.hpp"
#include "wavelet_packet.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wcoh {

inline constexpr std::uint64_t kDefaultSeed = 20121116;

/// Input transform applied before the coherence stage.
enum class Variant { original, trend, noise, denoised };

inline std::string to_string(Variant v)
{
    switch (v) {
    case Variant::original: return "original";
    case Variant::trend: return "trend";
    case Variant::noise: return "noise";
    case Variant::denoised: return "denoised";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s)
{
    for (auto v : {Variant::original, Variant::trend, Variant::noise, Variant::denoised})
        if (to_string(v) == s) return v;
    throw UsageError("variant: unknown value '" + std::string(s) + "'");
}

struct PipelineConfig {
    std::string input;
    std::string date_column = "date";
    /// Empty selects every non-date column.
    std::vector<std::string> columns;
    std::optional<Date> start;
    std::optional<Date> end;
    /// Empty means no rescaling.
    std::vector<double> scale_factors;
    /// Empty selects the first series.
    std::string target;
    std::size_t depth = 4;
    ThresholdMethod method = ThresholdMethod::SURE;
    Shrinkage rule = Shrinkage::garrote;
    std::size_t horizon = 30;
    std::string out_dir = "wcoh_out";
    std::uint64_t seed = kDefaultSeed;
    bool log = false;
    Variant variant = Variant::original;
};

/// Keys accepted by apply_setting, in echo order.
inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{"input", "date-column", "columns", "start",  "end",
                                               "scale-factors", "target", "depth", "method", "rule",
                                               "horizon", "out-dir", "seed", "log", "variant"};
    return keys;
}

namespace detail {

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    for (auto f : split(s, ',')) out.emplace_back(f);
    return out;
}

inline std::size_t parse_count(std::string_view key, std::string_view v)
{
    std::size_t out = 0;
    if (!parse_int(trim(v), out)) throw UsageError(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

inline Date parse_config_date(std::string_view key, std::string_view v)
{
    try {
        return parse_date(v);
    } catch (const DataError&) {
        throw UsageError(std::string(key) + ": unparseable date '" + std::string(v) + "'");
    }
}

inline bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep = ",")
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// Keeps [A-Za-z0-9_-]; anything else becomes '_'.
inline std::string file_token(std::string_view name)
{
    std::string out;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    return out.empty() ? "_" : out;
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

} // namespace detail

/// Sets one field from its textual form. Errors name the field.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view raw)
{
    const auto value = detail::trim(raw);
    const std::string k(key);
    if (key == "input") cfg.input = value;
    else if (key == "date-column") cfg.date_column = value;
    else if (key == "columns") cfg.columns = detail::split_list(value);
    else if (key == "start") cfg.start = value.empty() ? std::nullopt : std::optional(detail::parse_config_date(k, value));
    else if (key == "end") cfg.end = value.empty() ? std::nullopt : std::optional(detail::parse_config_date(k, value));
    else if (key == "scale-factors") {
        cfg.scale_factors.clear();
        for (const auto& f : detail::split_list(value)) {
            try {
                cfg.scale_factors.push_back(detail::parse_number(f));
            } catch (const DataError&) {
                throw UsageError("scale-factors: unparseable factor '" + f + "'");
            }
            if (!(cfg.scale_factors.back() > 0.0) || !std::isfinite(cfg.scale_factors.back()))
                throw UsageError("scale-factors: factors must be finite and positive");
        }
    } else if (key == "target") cfg.target = value;
    else if (key == "depth") {
        cfg.depth = detail::parse_count(k, value);
        if (cfg.depth < 1) throw UsageError("depth: must be >= 1");
    } else if (key == "method") {
        try {
            cfg.method = parse_threshold_method(value);
        } catch (const UsageError& e) {
            throw UsageError(std::string("method: ") + e.what());
        }
    } else if (key == "rule") {
        try {
            cfg.rule = parse_shrinkage(value);
        } catch (const UsageError& e) {
            throw UsageError(std::string("rule: ") + e.what());
        }
    } else if (key == "horizon") {
        cfg.horizon = detail::parse_count(k, value);
        if (cfg.horizon < 1) throw UsageError("horizon: must be >= 1");
    } else if (key == "out-dir") {
        if (value.empty()) throw UsageError("out-dir: must not be empty");
        cfg.out_dir = value;
    } else if (key == "seed") {
        std::uint64_t s = 0;
        if (!detail::parse_int(value, s)) throw UsageError("seed: expected a non-negative integer, got '" + std::string(value) + "'");
        cfg.seed = s;
    } else if (key == "log") cfg.log = detail::parse_bool(k, value);
    else if (key == "variant") cfg.variant = parse_variant(value);
    else throw UsageError("unknown configuration key '" + k + "'");
}

/// Flat key=value grammar; '#' starts a comment, blank lines are ignored.
inline void apply_config_text(PipelineConfig& cfg, std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto body = detail::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
        apply_setting(cfg, detail::trim(body.substr(0, eq)), body.substr(eq + 1));
    }
}

inline void apply_config_file(PipelineConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    apply_config_text(cfg, in);
}

/// Resolved configuration in the same key=value grammar.
inline std::string describe(const PipelineConfig& cfg)
{
    std::vector<std::string> factors;
    for (double f : cfg.scale_factors) factors.push_back(format_number(f));
    std::ostringstream os;
    os << "input=" << cfg.input << '\n'
       << "date-column=" << cfg.date_column << '\n'
       << "columns=" << detail::join(cfg.columns) << '\n'
       << "start=" << (cfg.start ? format_date(*cfg.start) : "") << '\n'
       << "end=" << (cfg.end ? format_date(*cfg.end) : "") << '\n'
       << "scale-factors=" << detail::join(factors) << '\n'
       << "target=" << cfg.target << '\n'
       << "depth=" << cfg.depth << '\n'
       << "method=" << to_string(cfg.method) << '\n'
       << "rule=" << to_string(cfg.rule) << '\n'
       << "horizon=" << cfg.horizon << '\n'
       << "out-dir=" << cfg.out_dir << '\n'
       << "seed=" << cfg.seed << '\n'
       << "log=" << (cfg.log ? "true" : "false") << '\n'
       << "variant=" << to_string(cfg.variant) << '\n';
    return os.str();
}

/// Loads the input and applies the optional log transform.
inline MultiSeries load_input(const PipelineConfig& cfg, std::ostream& log)
{
    if (cfg.input.empty()) throw UsageError("input: no input file given");
    auto loaded = load_csv(cfg.input, CsvSchema{cfg.date_column, cfg.columns});
    log << "loaded " << cfg.input << ": " << loaded.report.summary() << '\n';
    return cfg.log ? log_transform(loaded.data) : std::move(loaded.data);
}

inline std::size_t resolve_target(const PipelineConfig& cfg, const MultiSeries& ms)
{
    if (cfg.target.empty()) return 0;
    for (std::size_t i = 0; i < ms.size(); ++i)
        if (ms.names()[i] == cfg.target) return i;
    throw UsageError("target: no series named '" + cfg.target + "'");
}

/// Trend is the inverse transform of the all-lowpass packet node at `depth`;
/// noise is the remainder.
inline std::vector<double> packet_trend(std::span<const double> x, std::size_t depth)
{
    const auto tree = wpt_forward(x, depth);
    return reconstruct_node(tree, NodePath(depth, '0'));
}

inline MultiSeries apply_variant(const MultiSeries& ms, const PipelineConfig& cfg)
{
    if (cfg.variant == Variant::original) return ms;
    std::vector<std::vector<double>> cols;
    for (const auto& x : ms.columns()) {
        if (cfg.variant == Variant::denoised) {
            cols.push_back(denoise(x, cfg.method, cfg.rule, cfg.depth));
            continue;
        }
        auto trend = packet_trend(x, cfg.depth);
        if (cfg.variant == Variant::noise)
            for (std::size_t t = 0; t < x.size(); ++t) trend[t] = x[t] - trend[t];
        cols.push_back(std::move(trend));
    }
    return ms.with_columns(std::move(cols));
}

inline std::filesystem::path prepare_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

/// mwc_<target>.csv, plus pwc_<target>_<j>.csv and phase_<target>_<j>.csv
/// for every partner j when p >= 3.
inline std::vector<std::string> run_coherence(const PipelineConfig& cfg, const MultiSeries& input, std::ostream& log)
{
    if (input.size() < 2) throw DataError("coherence needs at least two series");
    const auto target = resolve_target(cfg, input);
    const auto ms = apply_variant(input, cfg);
    const auto dir = prepare_dir(cfg.out_dir);

    const auto grid = make_scale_grid(ms.length(), ms.dt());
    std::vector<WaveletField> fields;
    for (const auto& col : ms.columns()) fields.push_back(cwt_morlet(col, ms.dt(), grid));
    const Smoother smoother(grid, ms.dt());
    const auto cf = coherence_matrix_field(fields, smoother, ms.names());
    const auto res = analyze(cf, target);

    std::vector<std::string> written;
    const auto tname = detail::file_token(ms.names()[target]);
    const auto mwc = (dir / ("mwc_" + tname + ".csv")).string();
    emit_grid(res.multiple, mwc, "r2_multiple");
    written.push_back(mwc);
    for (const auto& [j, g] : res.partial_sq) {
        const auto jname = detail::file_token(ms.names()[j]);
        const auto pwc = (dir / ("pwc_" + tname + "_" + jname + ".csv")).string();
        const auto phase = (dir / ("phase_" + tname + "_" + jname + ".csv")).string();
        emit_grid(g, pwc, "r2_partial");
        emit_grid(res.partial_phase.at(j), phase, "phase_rad");
        written.push_back(pwc);
        written.push_back(phase);
    }
    log << "coherence (" << to_string(cfg.variant) << ", target " << ms.names()[target] << "): "
        << grid.num_scales << " scales x " << ms.length() << " times\n";
    return written;
}

/// energy_fractions.csv (series x leaf node, natural order), trend.csv, noise.csv.
inline std::vector<std::string> run_packet(const PipelineConfig& cfg, const MultiSeries& ms, std::ostream& log)
{
    const auto dir = prepare_dir(cfg.out_dir);
    const auto leaves = leaf_paths(cfg.depth);

    CsvTable energy;
    energy.header.push_back("series");
    for (const auto& p : leaves) energy.header.push_back(detail::quoted(node_label(p)));
    std::vector<std::vector<double>> trend_cols, noise_cols;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& x = ms.values(i);
        const auto tree = wpt_forward(x, cfg.depth);
        const auto frac = energy_fractions(tree);
        std::vector<std::string> row{ms.names()[i]};
        for (const auto& p : leaves) row.push_back(format_number(frac.at(p)));
        energy.add(std::move(row));

        auto trend = reconstruct_node(tree, NodePath(cfg.depth, '0'));
        std::vector<double> noise(x.size());
        for (std::size_t t = 0; t < x.size(); ++t) noise[t] = x[t] - trend[t];
        trend_cols.push_back(std::move(trend));
        noise_cols.push_back(std::move(noise));
    }
    const std::vector<std::string> written{(dir / "energy_fractions.csv").string(), (dir / "trend.csv").string(),
                                           (dir / "noise.csv").string()};
    energy.save(written[0]);
    series_table(ms.with_columns(std::move(trend_cols))).save(written[1]);
    series_table(ms.with_columns(std::move(noise_cols))).save(written[2]);
    log << "packet: depth " << cfg.depth << ", " << leaves.size() << " leaf nodes\n";
    return written;
}

/// denoise_report_<series>.csv per series (nine-method sweep) and
/// denoised.csv (configured method and rule).
inline std::vector<std::string> run_denoise(const PipelineConfig& cfg, const MultiSeries& ms, std::ostream& log)
{
    const auto dir = prepare_dir(cfg.out_dir);
    std::vector<std::string> written;
    std::vector<std::vector<double>> cleaned;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& x = ms.values(i);
        const auto report = method_sweep(x, cfg.rule, cfg.depth);
        CsvTable t;
        t.notes = {std::string(DenoiseReport::kConvention),
                   "Universal* use hard and VisuShrink* soft shrinkage; other methods use rule " + to_string(cfg.rule),
                   "winner_snr=" + to_string(report.winner_snr) + " winner_psnr=" + to_string(report.winner_psnr)};
        t.header = {"method", "rule", "threshold", "sigma", "snr_db", "psnr_db", "status"};
        for (const auto& row : report.rows) {
            std::vector<std::string> th;
            for (double v : row.thresholds.per_level) th.push_back(format_number(v));
            const std::string threshold = row.thresholds.global && !th.empty() ? th.front() : detail::join(th, ";");
            const bool same = row.fidelity.identical;
            t.add({to_string(row.method), to_string(row.rule), threshold, format_number(row.thresholds.sigma),
                   same ? "" : format_number(row.fidelity.snr), same ? "" : format_number(row.fidelity.psnr),
                   same ? "identical" : "ok"});
        }
        const auto path = (dir / ("denoise_report_" + detail::file_token(ms.names()[i]) + ".csv")).string();
        t.save(path);
        written.push_back(path);
        cleaned.push_back(denoise(x, cfg.method, cfg.rule, cfg.depth));
        log << "denoise " << ms.names()[i] << ": best SNR " << to_string(report.winner_snr) << ", best PSNR "
            << to_string(report.winner_psnr) << '\n';
    }
    const auto path = (dir / "denoised.csv").string();
    series_table(ms.with_columns(std::move(cleaned))).save(path);
    written.push_back(path);
    return written;
}

/// Fit sample and the H actuals that follow it.
struct ForecastSplit {
    MultiSeries fit;
    std::vector<Date> actual_dates;
    Eigen::MatrixXd actual;
    bool holdout = false;
};

/// Rescale, then window. Actuals are the H observations after the window
/// when the data has them, otherwise the last H of the window are held out.
inline ForecastSplit split_for_forecast(const PipelineConfig& cfg, const MultiSeries& input)
{
    const MultiSeries scaled = cfg.scale_factors.empty() ? input : rescale(input, cfg.scale_factors);
    const auto& ts = scaled.timestamps();
    const Date lo = cfg.start.value_or(ts.front());
    const Date hi = cfg.end.value_or(ts.back());
    const MultiSeries win = window(scaled, lo, hi);
    const auto h = static_cast<Eigen::Index>(cfg.horizon);
    const auto p = static_cast<Eigen::Index>(scaled.size());

    const auto after = static_cast<std::size_t>(ts.end() - std::upper_bound(ts.begin(), ts.end(), hi));
    auto take = [&](const MultiSeries& src, std::size_t first) {
        Eigen::MatrixXd a(h, p);
        std::vector<Date> dates;
        for (Eigen::Index r = 0; r < h; ++r) {
            const auto t = first + static_cast<std::size_t>(r);
            dates.push_back(src.timestamps()[t]);
            for (Eigen::Index c = 0; c < p; ++c) a(r, c) = src.values(static_cast<std::size_t>(c))[t];
        }
        return std::pair{dates, a};
    };
    if (cfg.end && after >= cfg.horizon) {
        const auto first = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), hi) - ts.begin());
        auto [dates, a] = take(scaled, first);
        return {win, std::move(dates), std::move(a), false};
    }
    if (win.length() < cfg.horizon + kMinFitLength)
        throw DataError("window too short to hold out " + std::to_string(cfg.horizon) + " observations and fit (need >= "
                        + std::to_string(cfg.horizon + kMinFitLength) + ")");
    const auto n_fit = win.length() - cfg.horizon;
    auto [dates, a] = take(win, n_fit);
    const MultiSeries fit = window(win, win.timestamps().front(), win.timestamps()[n_fit - 1]);
    return {fit, std::move(dates), std::move(a), true};
}

/// forecast_arma.csv, forecast_varma.csv, models.csv, mse_comparison.csv.
inline std::vector<std::string> run_forecast(const PipelineConfig& cfg, const MultiSeries& input, std::ostream& log)
{
    if (input.size() < 2) throw DataError("forecast needs at least two series for the VARMA model");
    const auto split = split_for_forecast(cfg, input);
    const auto& ms = split.fit;
    const auto dir = prepare_dir(cfg.out_dir);
    const auto p = ms.size();

    std::vector<ArmaModel> arma;
    std::vector<MseEvaluation> arma_eval;
    std::vector<ForecastResult> arma_fc;
    for (std::size_t i = 0; i < p; ++i) {
        arma.push_back(fit_arma11(ms.values(i)));
        arma_fc.push_back(forecast(arma.back(), cfg.horizon));
        arma_eval.push_back(evaluate_mse(arma_fc.back(), split.actual.col(static_cast<Eigen::Index>(i))));
    }
    const auto varma = fit_varma11(ms);
    const auto varma_fc = forecast(varma, cfg.horizon);
    const auto varma_eval = evaluate_mse(varma_fc, split.actual);

    const std::string band_note = "bands: point -/+ 1.96 sd from the psi-weight forecast-error covariance "
                                  "(Gaussian, 5% level)";
    const std::vector<std::string> fc_header{"h", "date", "series", "point", "lower", "upper", "actual", "squared_error"};
    CsvTable ta, tv;
    ta.notes = tv.notes = {band_note};
    ta.header = tv.header = fc_header;
    for (std::size_t k = 0; k < cfg.horizon; ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        for (std::size_t i = 0; i < p; ++i) {
            const auto c = static_cast<Eigen::Index>(i);
            const auto date = format_date(split.actual_dates[k]);
            const auto actual = format_number(split.actual(r, c));
            ta.add({std::to_string(k + 1), date, ms.names()[i], format_number(arma_fc[i].point(r, 0)),
                    format_number(arma_fc[i].lower(r, 0)), format_number(arma_fc[i].upper(r, 0)), actual,
                    format_number(arma_eval[i].squared_error(r, 0))});
            tv.add({std::to_string(k + 1), date, ms.names()[i], format_number(varma_fc.point(r, c)),
                    format_number(varma_fc.lower(r, c)), format_number(varma_fc.upper(r, c)), actual,
                    format_number(varma_eval.squared_error(r, c))});
        }
    }

    CsvTable models;
    models.header = {"model", "equation", "parameter", "value"};
    for (std::size_t i = 0; i < p; ++i) {
        const auto& m = arma[i];
        const auto& name = ms.names()[i];
        models.add({"ARMA", name, "mean", format_number(m.mean)});
        models.add({"ARMA", name, "phi", format_number(m.phi)});
        models.add({"ARMA", name, "theta", format_number(m.theta)});
        models.add({"ARMA", name, "sigma2", format_number(m.sigma2)});
        models.add({"ARMA", name, "warning", m.warning ? "1" : "0"});
    }
    for (std::size_t i = 0; i < p; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto& name = ms.names()[i];
        models.add({"VARMA", name, "mean", format_number(varma.mean(r))});
        for (const auto& [label, mat] : {std::pair{"phi", &varma.phi}, {"theta", &varma.theta}, {"sigma", &varma.sigma}})
            for (std::size_t j = 0; j < p; ++j)
                models.add({"VARMA", name, std::string(label) + ":" + ms.names()[j],
                            format_number((*mat)(r, static_cast<Eigen::Index>(j)))});
    }
    models.add({"VARMA", "all", "warning", varma.warning ? "1" : "0"});

    CsvTable cmp;
    cmp.header = {"series", "arma_mse", "varma_mse", "winner"};
    for (const auto& row : compare_mse(ms.names(), arma_eval, varma_eval))
        cmp.add({row.series, format_number(row.arma_mse), format_number(row.varma_mse), row.winner});

    const std::vector<std::string> written{(dir / "forecast_arma.csv").string(), (dir / "forecast_varma.csv").string(),
                                           (dir / "models.csv").string(), (dir / "mse_comparison.csv").string()};
    ta.save(written[0]);
    tv.save(written[1]);
    models.save(written[2]);
    cmp.save(written[3]);
    log << "forecast: fit on " << ms.length() << " observations (" << format_date(ms.timestamps().front()) << " to "
        << format_date(ms.timestamps().back()) << "), " << (split.holdout ? "held-out" : "following") << ' '
        << cfg.horizon << " observations as actuals\n";
    return written;
}

/// Every stage in sequence, each into its own subdirectory; coherence runs
/// once per input variant.
inline std::vector<std::string> run_pipeline(const PipelineConfig& cfg, const MultiSeries& ms, std::ostream& log)
{
    const std::filesystem::path root(cfg.out_dir);
    std::vector<std::string> written;
    auto stage = [&](const std::filesystem::path& sub) {
        PipelineConfig c = cfg;
        c.out_dir = (root / sub).string();
        return c;
    };
    auto append = [&](std::vector<std::string> files) { written.insert(written.end(), files.begin(), files.end()); };
    append(run_packet(stage("packet"), ms, log));
    append(run_denoise(stage("denoise"), ms, log));
    for (auto v : {Variant::original, Variant::trend, Variant::noise, Variant::denoised}) {
        auto c = stage(std::filesystem::path("coherence") / to_string(v));
        c.variant = v;
        append(run_coherence(c, ms, log));
    }
    append(run_forecast(stage("forecast"), ms, log));
    return written;
}

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"coherence", "packet", "denoise", "forecast", "pipeline"};
    return names;
}

/// Echoes the resolved configuration, runs one subcommand, lists the files written.
inline void run(std::string_view subcommand, const PipelineConfig& cfg, std::ostream& log)
{
    const auto& known = subcommands();
    if (std::find(known.begin(), known.end(), subcommand) == known.end())
        throw UsageError("unknown subcommand '" + std::string(subcommand) + "'");
    log << "# resolved configuration\n" << describe(cfg);
    const auto ms = load_input(cfg, log);
    std::vector<std::string> written;
    if (subcommand == "coherence") written = run_coherence(cfg, ms, log);
    else if (subcommand == "packet") written = run_packet(cfg, ms, log);
    else if (subcommand == "denoise") written = run_denoise(cfg, ms, log);
    else if (subcommand == "forecast") written = run_forecast(cfg, ms, log);
    else written = run_pipeline(cfg, ms, log);
    for (const auto& f : written) log << "wrote " << f << '\n';
}

} // namespace wcoh

#endif // WCOH_PIPELINE_HPP
