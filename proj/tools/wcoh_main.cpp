// wcoh: wavelet coherence, packet split, de-noising and VARMA forecasting
// over a CSV of aligned daily series.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <wcoh/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

struct FlagSpec {
    const char* key;
    const char* help;
};

const FlagSpec kFlags[] = {
    {"input", "CSV file with a header row"},
    {"date-column", "name of the date column (default: date)"},
    {"columns", "comma-separated value columns (default: all but the date)"},
    {"start", "forecast window start, YYYY-MM-DD or DD.MM.YYYY"},
    {"end", "forecast window end, inclusive"},
    {"scale-factors", "comma-separated positive factors, one per series (forecast stage)"},
    {"target", "dependent series for coherence (default: first column)"},
    {"depth", "packet depth and de-noising level (default: 4)"},
    {"method", "threshold selector: GCV, GCVLevel, SURE, SURELevel, SUREShrink, Universal, UniversalLevel, "
               "VisuShrink, VisuShrinkLevel (default: SURE)"},
    {"rule", "shrinkage rule: hard, soft, garrote (default: garrote)"},
    {"horizon", "forecast horizon (default: 30)"},
    {"out-dir", "output directory (default: wcoh_out)"},
    {"seed", "random seed, echoed for reproducibility"},
    {"variant", "coherence input: original, trend, noise, denoised (default: original)"},
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"wavelet coherence, packet split, de-noising and VARMA forecasting"};
    app.fallthrough();
    app.require_subcommand(1);

    std::map<std::string, std::string> flag_values;
    for (const auto& f : kFlags) app.add_option(std::string("--") + f.key, flag_values[f.key], f.help);
    bool log_transform = false;
    app.add_flag("--log", log_transform, "take natural logs of all values after loading");
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value configuration file; flags override it");

    for (const auto& name : wcoh::subcommands()) app.add_subcommand(name, "run the " + name + " stage");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n' << "run with --help for the option list\n";
        return 1;
    }

    try {
        wcoh::PipelineConfig cfg;
        if (!config_path.empty()) wcoh::apply_config_file(cfg, config_path);
        for (const auto& f : kFlags)
            if (app.count(std::string("--") + f.key) > 0) wcoh::apply_setting(cfg, f.key, flag_values[f.key]);
        if (log_transform) cfg.log = true;

        wcoh::run(app.get_subcommands().front()->get_name(), cfg, std::cout);
    } catch (const wcoh::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const wcoh::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
