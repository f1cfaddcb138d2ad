#include <wcoh/pipeline.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

using namespace wcoh;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& scratch)
{
    const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
    const std::string cmd = std::string(WCOH_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

/// Shared 1024 x 4 input, written once.
const std::string& prices_csv()
{
    static const std::string path = [] {
        const auto dir = scratch_dir("input");
        const auto p = (dir / "prices.csv").string();
        write_synthetic_prices(p, 1024, 4, 11);
        return p;
    }();
    return path;
}

PipelineConfig config_for(const fs::path& out)
{
    PipelineConfig cfg;
    cfg.input = prices_csv();
    cfg.out_dir = out.string();
    return cfg;
}

MultiSeries load(const PipelineConfig& cfg)
{
    std::ostringstream sink;
    return load_input(cfg, sink);
}

RealGrid small_grid()
{
    RealGrid g({2.0, 2.5, 3.0}, 4);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = 0.1 * static_cast<double>(i) + 1.0 / 3.0;
    g.flags[g.index(2, 0)] |= kOutsideCoi;
    g.flags[g.index(2, 3)] |= kOutsideCoi;
    g.flags[g.index(1, 1)] |= kDegenerate;
    return g;
}

} // namespace

TEST(EmitGrid, RowCountAndFlags)
{
    std::ostringstream os;
    write_grid(os, small_grid(), "r2_multiple");
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "scale_dt,time_index,r2_multiple,coi_flag,degenerate_flag");
    std::size_t rows = 0, coi = 0, degenerate = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto f = detail::split(line, ',');
        ASSERT_EQ(f.size(), 5u);
        coi += f[3] == "1";
        degenerate += f[4] == "1";
        EXPECT_EQ(line.find("nan"), std::string::npos);
    }
    EXPECT_EQ(rows, 12u);
    EXPECT_EQ(coi, 2u);
    EXPECT_EQ(degenerate, 1u);
}

TEST(EmitGrid, RoundTripIsExact)
{
    const auto g = small_grid();
    std::stringstream ss;
    write_grid(ss, g, "value");
    const auto back = read_grid(ss);
    EXPECT_EQ(back.scales, g.scales);
    EXPECT_EQ(back.n_times, g.n_times);
    EXPECT_EQ(back.flags, g.flags);
    for (std::size_t i = 0; i < g.values.size(); ++i) EXPECT_NEAR(back.values[i], g.values[i], 1e-12);
    EXPECT_EQ(back.values, g.values);
}

TEST(EmitGrid, ComplexGridHasTwoValueColumns)
{
    Grid<std::complex<double>> g({4.0}, 2, {1.0, -2.0});
    std::ostringstream os;
    write_grid(os, g, "w");
    EXPECT_EQ(os.str(), "scale_dt,time_index,w_re,w_im,coi_flag,degenerate_flag\n4,0,1,-2,0,0\n4,1,1,-2,0,0\n");
}

TEST(EmitGrid, UnwritablePath)
{
    EXPECT_THROW(emit_grid(small_grid(), "/nonexistent/dir/grid.csv", "v"), DataError);
}

TEST(ReadGrid, RejectsIncompleteGrid)
{
    std::istringstream in("scale_dt,time_index,v,coi_flag,degenerate_flag\n2,0,1,0,0\n2,1,1,0,0\n3,0,1,0,0\n");
    EXPECT_THROW(read_grid(in), DataError);
}

TEST(Config, Defaults)
{
    const PipelineConfig cfg;
    EXPECT_EQ(cfg.horizon, 30u);
    EXPECT_EQ(cfg.depth, 4u);
    EXPECT_EQ(cfg.method, ThresholdMethod::SURE);
    EXPECT_EQ(cfg.rule, Shrinkage::garrote);
    EXPECT_EQ(cfg.seed, kDefaultSeed);
    EXPECT_EQ(cfg.variant, Variant::original);
}

TEST(Config, TextGrammar)
{
    PipelineConfig cfg;
    std::istringstream in("# comment line\n\ninput = prices.csv\nstart=14.11.2011  # trailing comment\n"
                          "end=2012-11-16\nscale-factors=10,2,0.5,2\ncolumns=a, b\nmethod=GCVLevel\nrule=soft\n"
                          "horizon=12\nlog=true\n");
    apply_config_text(cfg, in);
    EXPECT_EQ(cfg.input, "prices.csv");
    EXPECT_EQ(format_date(*cfg.start), "2011-11-14");
    EXPECT_EQ(format_date(*cfg.end), "2012-11-16");
    EXPECT_EQ(cfg.scale_factors, (std::vector<double>{10.0, 2.0, 0.5, 2.0}));
    EXPECT_EQ(cfg.columns, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(cfg.method, ThresholdMethod::GCVLevel);
    EXPECT_EQ(cfg.rule, Shrinkage::soft);
    EXPECT_EQ(cfg.horizon, 12u);
    EXPECT_TRUE(cfg.log);
}

TEST(Config, ErrorsNameTheField)
{
    auto expect_field = [](const std::string& key, const std::string& value, const std::string& needle) {
        PipelineConfig cfg;
        try {
            apply_setting(cfg, key, value);
            ADD_FAILURE() << key << "=" << value << " accepted";
        } catch (const UsageError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_field("horizon", "0", "horizon");
    expect_field("horizon", "-3", "horizon");
    expect_field("depth", "0", "depth");
    expect_field("depth", "four", "depth");
    expect_field("method", "Oracle", "method");
    expect_field("rule", "firm", "rule");
    expect_field("start", "2012/01/01", "start");
    expect_field("scale-factors", "1,0", "scale-factors");
    expect_field("scale-factors", "1,x", "scale-factors");
    expect_field("seed", "abc", "seed");
    expect_field("log", "maybe", "log");
    expect_field("variant", "smooth", "variant");
    expect_field("colour", "red", "colour");

    PipelineConfig cfg;
    std::istringstream bad("horizon 30\n");
    EXPECT_THROW(apply_config_text(cfg, bad), UsageError);
    EXPECT_THROW(apply_config_file(cfg, "/nonexistent/config.txt"), UsageError);
}

TEST(Config, DescribeRoundTrips)
{
    PipelineConfig cfg;
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
             {"input", "x.csv"}, {"start", "2011-11-14"}, {"scale-factors", "10,2,0.5"}, {"target", "m2"},
             {"depth", "5"}, {"method", "VisuShrinkLevel"}, {"seed", "99"}, {"variant", "noise"}})
        apply_setting(cfg, k, v);
    const auto text = describe(cfg);
    PipelineConfig back;
    std::istringstream in(text);
    apply_config_text(back, in);
    EXPECT_EQ(describe(back), text);
    for (const auto& key : config_keys()) EXPECT_NE(text.find(key + "="), std::string::npos) << key;
}

TEST(Pipeline, CoherenceManifest)
{
    const auto dir = scratch_dir("coherence");
    auto cfg = config_for(dir);
    std::ostringstream log;
    run_coherence(cfg, load(cfg), log);
    EXPECT_EQ(list_files(dir), (std::vector<std::string>{"mwc_m1.csv", "phase_m1_m2.csv", "phase_m1_m3.csv",
                                                         "phase_m1_m4.csv", "pwc_m1_m2.csv", "pwc_m1_m3.csv",
                                                         "pwc_m1_m4.csv"}));
    std::ifstream in(dir / "mwc_m1.csv");
    const auto g = read_grid(in);
    EXPECT_EQ(g.n_times, 1024u);
    EXPECT_EQ(g.n_scales(), 109u);
}

TEST(Pipeline, CoherenceTargetAndSeriesCount)
{
    const auto dir = scratch_dir("coherence_target");
    auto cfg = config_for(dir);
    cfg.target = "m3";
    cfg.columns = {"m1", "m3"};
    std::ostringstream log;
    run_coherence(cfg, load(cfg), log);
    EXPECT_EQ(list_files(dir), (std::vector<std::string>{"mwc_m3.csv"}));
    cfg.target = "m9";
    EXPECT_THROW(run_coherence(cfg, load(cfg), log), UsageError);
    cfg.target.clear();
    cfg.columns = {"m1"};
    EXPECT_THROW(run_coherence(cfg, load(cfg), log), DataError);
}

TEST(Pipeline, PacketAndDenoiseManifests)
{
    const auto dir = scratch_dir("packet_denoise");
    auto cfg = config_for(dir / "packet");
    std::ostringstream log;
    const auto ms = load(cfg);
    run_packet(cfg, ms, log);
    EXPECT_EQ(list_files(dir / "packet"), (std::vector<std::string>{"energy_fractions.csv", "noise.csv", "trend.csv"}));
    const auto energy = read_file(dir / "packet" / "energy_fractions.csv");
    EXPECT_EQ(energy.substr(0, energy.find('\n')).find("series,\"{0,0,0,0}\",\"{0,0,0,1}\""), 0u);

    cfg.out_dir = (dir / "denoise").string();
    run_denoise(cfg, ms, log);
    EXPECT_EQ(list_files(dir / "denoise"),
              (std::vector<std::string>{"denoise_report_m1.csv", "denoise_report_m2.csv", "denoise_report_m3.csv",
                                        "denoise_report_m4.csv", "denoised.csv"}));
    const auto report = read_file(dir / "denoise" / "denoise_report_m1.csv");
    EXPECT_EQ(report.rfind("# ", 0), 0u);
    EXPECT_NE(report.find("method,rule,threshold,sigma,snr_db,psnr_db,status"), std::string::npos);
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 3 + 1 + 9);
}

TEST(Pipeline, ForecastManifestAndHoldout)
{
    const auto dir = scratch_dir("forecast");
    auto cfg = config_for(dir);
    std::ostringstream log;
    const auto ms = load(cfg);
    run_forecast(cfg, ms, log);
    EXPECT_EQ(list_files(dir), (std::vector<std::string>{"forecast_arma.csv", "forecast_varma.csv",
                                                         "models.csv", "mse_comparison.csv"}));
    const auto cmp = read_file(dir / "mse_comparison.csv");
    EXPECT_EQ(std::count(cmp.begin(), cmp.end(), '\n'), 5);
    const auto fc = read_file(dir / "forecast_varma.csv");
    EXPECT_EQ(std::count(fc.begin(), fc.end(), '\n'), 1 + 1 + 30 * 4);
    EXPECT_NE(fc.find(format_date(ms.timestamps().back())), std::string::npos);
}

TEST(Pipeline, ForecastSplitUsesFollowingObservations)
{
    auto cfg = config_for(fs::temp_directory_path());
    const auto ms = load(cfg);
    const auto& ts = ms.timestamps();
    cfg.start = ts[500];
    cfg.end = ts[755];
    cfg.scale_factors = {10.0, 2.0, 0.5, 2.0};
    const auto split = split_for_forecast(cfg, ms);
    EXPECT_FALSE(split.holdout);
    EXPECT_EQ(split.fit.length(), 256u);
    EXPECT_EQ(split.actual_dates.front(), ts[756]);
    EXPECT_DOUBLE_EQ(split.actual(0, 2), 0.5 * ms.values(2)[756]);

    cfg.end = ts[1010];
    const auto tail = split_for_forecast(cfg, ms);
    EXPECT_TRUE(tail.holdout);
    EXPECT_EQ(tail.fit.length(), 511u - 30u);
    EXPECT_EQ(tail.actual_dates.back(), ts[1010]);

    cfg.start = ts[980];
    EXPECT_THROW(split_for_forecast(cfg, ms), DataError);
    cfg.start.reset();
    cfg.scale_factors = {1.0, 2.0};
    EXPECT_THROW(split_for_forecast(cfg, ms), UsageError);
}

TEST(Pipeline, EqualsCompositionOfStages)
{
    const auto dir = scratch_dir("composition");
    auto cfg = config_for(dir / "pipeline");
    std::ostringstream log;
    const auto ms = load(cfg);
    run_pipeline(cfg, ms, log);

    auto stage = [&](const std::string& sub) {
        auto c = cfg;
        c.out_dir = (dir / "stages" / sub).string();
        return c;
    };
    run_packet(stage("packet"), ms, log);
    run_denoise(stage("denoise"), ms, log);
    for (auto v : {Variant::original, Variant::trend, Variant::noise, Variant::denoised}) {
        auto c = stage("coherence/" + to_string(v));
        c.variant = v;
        run_coherence(c, ms, log);
    }
    run_forecast(stage("forecast"), ms, log);

    const auto a = list_files(dir / "pipeline"), b = list_files(dir / "stages");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 3u + 5u + 4u * 7u + 4u);
    for (const auto& f : a) EXPECT_EQ(read_file(dir / "pipeline" / f), read_file(dir / "stages" / f)) << f;
}

TEST(Pipeline, VariantsChangeCoherenceInput)
{
    auto cfg = config_for(fs::temp_directory_path());
    const auto ms = load(cfg);
    cfg.variant = Variant::trend;
    const auto trend = apply_variant(ms, cfg);
    cfg.variant = Variant::noise;
    const auto noise = apply_variant(ms, cfg);
    for (std::size_t j = 0; j < ms.size(); ++j)
        for (std::size_t t = 0; t < ms.length(); ++t)
            EXPECT_NEAR(trend.values(j)[t] + noise.values(j)[t], ms.values(j)[t], 1e-9);
    cfg.variant = Variant::original;
    EXPECT_EQ(apply_variant(ms, cfg), ms);
}

TEST(Cli, SuccessEchoesConfigAndSeed)
{
    const auto dir = scratch_dir("cli_ok");
    const auto r = run_cli("packet --input " + prices_csv() + " --out-dir " + (dir / "out").string() + " --seed 7", dir);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("# resolved configuration"), std::string::npos);
    EXPECT_NE(r.out.find("seed=7"), std::string::npos);
    EXPECT_NE(r.out.find("wrote "), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "energy_fractions.csv"));
}

TEST(Cli, FlagOverridesConfigFile)
{
    const auto dir = scratch_dir("cli_config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "input=" << prices_csv() << "\nout-dir=" << (dir / "out").string() << "\ndepth=3\nhorizon=10\n";
    }
    const auto r = run_cli("packet --config " + (dir / "run.cfg").string() + " --depth 2", dir);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("depth=2\n"), std::string::npos);
    EXPECT_NE(r.out.find("horizon=10\n"), std::string::npos);
    const auto energy = read_file(dir / "out" / "energy_fractions.csv");
    EXPECT_NE(energy.find("\"{1,1}\""), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    const auto dir = scratch_dir("cli_exit");
    const auto out = " --out-dir " + (dir / "out").string();

    const auto missing = run_cli("packet --input /nonexistent/prices.csv" + out, dir);
    EXPECT_EQ(missing.status, 2);
    EXPECT_NE(missing.err.find("/nonexistent/prices.csv"), std::string::npos);

    const auto method = run_cli("denoise --input " + prices_csv() + " --method Oracle" + out, dir);
    EXPECT_EQ(method.status, 1);
    EXPECT_NE(method.err.find("method"), std::string::npos);

    EXPECT_EQ(run_cli("--input " + prices_csv(), dir).status, 1);
    EXPECT_EQ(run_cli("explode --input " + prices_csv(), dir).status, 1);
    EXPECT_EQ(run_cli("packet --colour red --input " + prices_csv(), dir).status, 1);
    EXPECT_EQ(run_cli("packet --horizon 0 --input " + prices_csv() + out, dir).status, 1);
    EXPECT_EQ(run_cli("coherence --columns m1 --input " + prices_csv() + out, dir).status, 2);
    EXPECT_EQ(run_cli("--help", dir).status, 0);
}
