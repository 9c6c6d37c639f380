// frackpz command line driver: thin shell over the C API.
//
//   frackpz <kind> --config <file> [--out <dir>] [--seed <n>] [--lambdas a:b:n]
//
// Exit codes: 0 success, 2 validation failure, 3 numerical/runtime failure.

#include "frackpz.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int map_exit(fkpz_status st) {
    switch (st) {
    case FKPZ_OK: return 0;
    case FKPZ_INVALID_ARGUMENT: return 2;
    default: return 3;
    }
}

std::vector<double> parse_lambda_range(const std::string& text) {
    // a:b:n -> n values linearly spaced over [a,b]
    double a = 0.0, b = 0.0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
        throw CLI::ValidationError("--lambdas", "expected a:b:n with n >= 1");
    std::vector<double> out;
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("frackpz — fractional KPZ numerical laboratory (") +
                 fkpz_version() + ")"};
    std::string kind, config_path, out_dir, lambdas_text;
    long long seed = -1;

    app.add_option("kind", kind,
                   "experiment kind: solve_poisson|operator_validate|cz_probe|thresholds|"
                   "iterate|sweep|nonexist_kpz1|nonexist_kpz3|decomposition")
        ->required();
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--out", out_dir, "output directory (overrides config output_dir)");
    app.add_option("--seed", seed, "seed override for the property batteries");
    app.add_option("--lambdas", lambdas_text, "sweep grid a:b:n (sweep only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::ifstream is(config_path, std::ios::binary);
    if (!is) {
        std::fprintf(stderr, "frackpz: cannot read config '%s'\n", config_path.c_str());
        return 2;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    std::string config_text = ss.str();

    // the positional kind must agree with the config, and --lambdas patches the
    // sweep grid before the config crosses the C boundary
    try {
        nlohmann::json cfg = nlohmann::json::parse(config_text);
        if (!cfg.is_object() || !cfg.contains("experiment") || !cfg["experiment"].is_string()) {
            std::fprintf(stderr, "frackpz: config lacks an experiment kind\n");
            return 2;
        }
        if (cfg["experiment"].get<std::string>() != kind) {
            std::fprintf(stderr, "frackpz: config experiment '%s' does not match '%s'\n",
                         cfg["experiment"].get<std::string>().c_str(), kind.c_str());
            return 2;
        }
        if (!lambdas_text.empty()) {
            if (kind != "sweep") {
                std::fprintf(stderr, "frackpz: --lambdas is only valid for sweep\n");
                return 2;
            }
            cfg["lambdas"] = parse_lambda_range(lambdas_text);
            config_text = cfg.dump();
        }
        if (out_dir.empty()) {
            if (cfg.contains("output_dir") && cfg["output_dir"].is_string())
                out_dir = cfg["output_dir"].get<std::string>();
            else {
                std::fprintf(stderr, "frackpz: no output directory (config or --out)\n");
                return 2;
            }
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "frackpz: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "frackpz: config parse failure: %s\n", e.what());
        return 2;
    }

    const fkpz_status st = fkpz_run_experiment(config_text.c_str(), out_dir.c_str(), seed);
    if (st != FKPZ_OK) {
        std::fprintf(stderr, "frackpz: %s\n", fkpz_last_error());
        return map_exit(st);
    }
    std::printf("frackpz: %s complete, outputs in %s\n", kind.c_str(), out_dir.c_str());
    return 0;
}
