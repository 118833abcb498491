// SPDX-License-Identifier: Apache-2.0
//
// wos: evaluate a scene config on a grid or point list, or run a validation study.
//
// Precedence: command line flags > config file > built-in defaults.

#include "vcwos/io/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

vcwos::WeightWindow parse_window(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw vcwos::ConfigError("--window expects MIN,MAX");
    }
    vcwos::WeightWindow w;
    try {
        w.w_min = std::stod(text.substr(0, comma));
        w.w_max = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw vcwos::ConfigError("--window expects MIN,MAX");
    }
    w.validate();
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walk on spheres for variable-coefficient elliptic problems"};
    app.set_version_flag("--version", "wos 1.0 (catalog " + std::string(vcwos::catalog_version) + ")");

    std::string config_path;
    std::string catalog;
    std::optional<std::string> estimator;
    std::optional<std::uint64_t> spp;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> sigma_bar;
    std::optional<std::string> window;
    bool gradient = false;
    bool mask_exterior = false;
    std::string study;
    std::optional<std::string> out_dir;
    bool list = false;

    app.add_option("--config", config_path, "JSON scene config")->check(CLI::ExistingFile);
    app.add_option("--catalog", catalog, "catalog problem id, used when no config is given");
    app.add_option("--estimator", estimator, "classic | dt | nf | sde");
    app.add_option("--spp", spp, "walks per point (for studies: the study's walk count)")->check(CLI::PositiveNumber);
    app.add_option("--eps", eps, "epsilon-shell width")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "global seed");
    app.add_option("--workers", workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--sigma-bar", sigma_bar, "override the screening majorant")->check(CLI::PositiveNumber);
    app.add_option("--window", window, "weight window MIN,MAX");
    app.add_flag("--gradient", gradient, "also estimate the gradient");
    app.add_flag("--mask-exterior", mask_exterior, "skip target points outside the domain instead of failing");
    app.add_option("--study", study, "run a study instead of a solve");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--list", list, "list catalog problems and studies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (list) {
        for (const auto& e : vcwos::catalog_index()) {
            std::cout << e.id << "  " << e.dim << "D  " << e.description << '\n';
        }
        std::cout << "studies:";
        for (const auto& s : vcwos::io::study_names()) {
            std::cout << ' ' << s;
        }
        std::cout << '\n';
        return 0;
    }

    try {
        vcwos::io::SceneConfig c;
        if (!config_path.empty()) {
            c = vcwos::io::load_config(config_path);
        } else if (!catalog.empty()) {
            c = vcwos::io::config_from_json({{"catalog", catalog}});
        } else {
            std::cerr << "wos: need --config or --catalog\n";
            return 2;
        }
        if (estimator) c.estimator = *estimator;
        if (spp) c.spp = *spp;
        if (eps) c.epsilon = *eps;
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (sigma_bar) c.sigma_bar = *sigma_bar;
        if (window) c.window = parse_window(*window);
        if (gradient) c.gradient = true;
        if (mask_exterior) c.mask_exterior = true;
        if (out_dir) c.out_dir = *out_dir;
        vcwos::io::validate(c);

        if (!study.empty()) {
            const vcwos::StudyReport report = vcwos::io::run_study(c, study, spp);
            const std::string path = report.write(c.out_dir);
            std::cout << report.summary() << (report.passed() ? "PASS " : "FAIL ") << report.study << " on "
                      << report.problem << " -> " << path << '\n';
            return report.passed() ? 0 : 1;
        }
        const vcwos::io::RunOutputs out = vcwos::io::run_solve(c, std::cout);
        std::cout << "wrote " << out.csv << ", " << out.json;
        if (!out.pfm.empty()) {
            std::cout << ", " << out.pfm << ", " << out.pgm;
        }
        std::cout << '\n';
        return 0;
    } catch (const vcwos::ConfigError& e) {
        std::cerr << "wos: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "wos: " << e.what() << '\n';
        return 3;
    }
}
