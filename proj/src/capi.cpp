#include "frackpz.h"

#include "frackpz/errors.hpp"
#include "frackpz/experiment.hpp"
#include "frackpz/poisson.hpp"

#include <json.hpp>

#include <cstring>
#include <memory>
#include <string>

namespace {

thread_local std::string g_last_error;

fkpz_status record(const std::exception& e, fkpz_status code) {
    g_last_error = e.what();
    return code;
}

template <class Fn>
fkpz_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FKPZ_OK;
    } catch (const frackpz::validation_error& e) {
        return record(e, FKPZ_INVALID_ARGUMENT);
    } catch (const frackpz::io_error& e) {
        return record(e, FKPZ_IO_ERROR);
    } catch (const frackpz::numerical_error& e) {
        return record(e, FKPZ_NUMERICAL_ERROR);
    } catch (const std::exception& e) {
        return record(e, FKPZ_NUMERICAL_ERROR);
    }
}

frackpz::Domain domain_from_json(const char* domain_json) {
    // reuse the experiment config parser through a minimal wrapper config
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(domain_json ? domain_json : "");
    } catch (const std::exception& e) {
        throw frackpz::validation_error(std::string("domain JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("shape") || !j["shape"].is_string())
        throw frackpz::validation_error("domain JSON needs a shape");
    const std::string shape = j["shape"].get<std::string>();
    auto num = [&](const char* k) {
        if (!j.contains(k) || !j[k].is_number())
            throw frackpz::validation_error(std::string("domain JSON needs number '") + k + "'");
        return j[k].get<double>();
    };
    auto pt = [&](const char* k) -> frackpz::Point {
        if (!j.contains(k) || !j[k].is_array() || j[k].size() != 2)
            throw frackpz::validation_error(std::string("domain JSON needs pair '") + k + "'");
        return {j[k][0].get<double>(), j[k][1].get<double>()};
    };
    if (shape == "interval") return frackpz::Domain::interval(num("a"), num("b"));
    if (shape == "disk") return frackpz::Domain::disk(pt("center"), num("radius"));
    if (shape == "square") return frackpz::Domain::square(pt("corner"), num("side"));
    throw frackpz::validation_error("domain JSON shape must be interval|disk|square");
}

} // namespace

struct fkpz_grid {
    std::shared_ptr<const frackpz::Grid> grid;
};

struct fkpz_operator {
    std::unique_ptr<frackpz::OperatorMatrix> op;
};

struct fkpz_green {
    std::unique_ptr<frackpz::GreenOperator> green;
};

extern "C" {

const char* fkpz_version(void) { return frackpz::kCodeVersion; }

const char* fkpz_last_error(void) { return g_last_error.c_str(); }

fkpz_status fkpz_grid_create(const char* domain_json, double h, fkpz_grid** out) {
    if (!out) return FKPZ_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<fkpz_grid>();
        handle->grid = frackpz::make_grid(domain_from_json(domain_json), h);
        *out = handle.release();
    });
}

void fkpz_grid_destroy(fkpz_grid* grid) { delete grid; }

int fkpz_grid_node_count(const fkpz_grid* grid) {
    return grid ? grid->grid->node_count() : -1;
}

int fkpz_grid_dimension(const fkpz_grid* grid) {
    return grid ? grid->grid->dimension() : -1;
}

double fkpz_grid_cell_measure(const fkpz_grid* grid) {
    return grid ? grid->grid->cell_measure() : 0.0;
}

double fkpz_grid_tail_radius(const fkpz_grid* grid) {
    return grid ? grid->grid->tail_radius() : 0.0;
}

fkpz_status fkpz_grid_nodes(const fkpz_grid* grid, double* xy) {
    if (!grid || !xy) return FKPZ_INVALID_ARGUMENT;
    return guarded([&] {
        const auto& g = *grid->grid;
        for (int i = 0; i < g.node_count(); ++i)
            for (int d = 0; d < g.dimension(); ++d)
                xy[static_cast<std::size_t>(i) * g.dimension() + d] = g.nodes()[i][d];
    });
}

fkpz_status fkpz_grid_boundary_distance(const fkpz_grid* grid, double* delta) {
    if (!grid || !delta) return FKPZ_INVALID_ARGUMENT;
    return guarded([&] {
        const auto& g = *grid->grid;
        for (int i = 0; i < g.node_count(); ++i) delta[i] = g.delta()[static_cast<std::size_t>(i)];
    });
}

fkpz_status fkpz_operator_assemble(const fkpz_grid* grid, double sigma, fkpz_operator** out) {
    if (!grid || !out) return FKPZ_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<fkpz_operator>();
        handle->op =
            std::make_unique<frackpz::OperatorMatrix>(grid->grid, sigma);
        *out = handle.release();
    });
}

void fkpz_operator_destroy(fkpz_operator* op) { delete op; }

fkpz_status fkpz_operator_apply(const fkpz_operator* op, const double* u, double* out) {
    if (!op || !u || !out) return FKPZ_INVALID_ARGUMENT;
    return guarded([&] {
        const int n = op->op->grid().node_count();
        Eigen::Map<const Eigen::VectorXd> uin(u, n);
        Eigen::Map<Eigen::VectorXd> uout(out, n);
        uout = op->op->apply(uin);
    });
}

fkpz_status fkpz_green_create(const fkpz_grid* grid, double s, fkpz_green** out) {
    if (!grid || !out) return FKPZ_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<fkpz_green>();
        handle->green = std::make_unique<frackpz::GreenOperator>(grid->grid, s);
        *out = handle.release();
    });
}

void fkpz_green_destroy(fkpz_green* green) { delete green; }

fkpz_status fkpz_green_solve(const fkpz_green* green, const double* h, double* u) {
    if (!green || !h || !u) return FKPZ_INVALID_ARGUMENT;
    return guarded([&] {
        const int n = green->green->grid().node_count();
        Eigen::Map<const Eigen::VectorXd> hin(h, n);
        Eigen::Map<Eigen::VectorXd> uout(u, n);
        uout = green->green->solve(Eigen::VectorXd(hin));
    });
}

fkpz_status fkpz_run_experiment(const char* config_json, const char* out_dir,
                                int64_t seed_override) {
    if (!config_json || !out_dir) return FKPZ_INVALID_ARGUMENT;
    return guarded([&] {
        std::optional<std::uint64_t> seed;
        if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
        frackpz::run_experiment(config_json, out_dir, seed);
    });
}

} // extern "C"
