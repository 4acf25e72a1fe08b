#include "efie/cli.hpp"

#include "efie/export.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace efie {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

std::string vtk_name(int iter) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "mesh_%03d.vtk", iter);
    return buf;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << std::setw(2) << j << '\n';
}

nlohmann::json solution_summary(const Solution& s) {
    const GlobalSummary g = global_summary(s.indicators, s.rt->dofs());
    return {
        {"elements", s.mesh->num_triangles()},
        {"dofs", s.rt->dofs()},
        {"h_max", g.h_max},
        {"relative_residual", s.system.relative_residual},
        {"rcond", s.system.rcond},
        {"condition_estimate", 1.0 / s.system.rcond},
        {"eta", g.eta},
        {"osc", g.osc},
        {"max_normal_leak", s.residual.max_normal_leak},
    };
}

nlohmann::json study_json(const StudyLog& log) {
    auto rows = nlohmann::json::array();
    for (const auto& r : log.rows) {
        nlohmann::json j = {{"iter", r.iter},     {"elements", r.elements}, {"dofs", r.dofs}, {"h_max", r.h_max},
                            {"eta", r.eta},       {"osc", r.osc},           {"marked", r.marked}};
        j["effectivity"] = r.effectivity ? nlohmann::json(*r.effectivity) : nlohmann::json(nullptr);
        rows.push_back(std::move(j));
    }
    return rows;
}

void write_final(const RunConfig& cfg, const Solution& s) {
    write_solution(out_path(cfg, "solution.bin"), *s.mesh, s.system.x);
    write_indicators_csv(s.indicators, out_path(cfg, "indicators.csv"));
}

}  // namespace

MeshPtr initial_mesh(const RunConfig& cfg) {
    MeshPtr mesh;
    const bool canonical = cfg.geometry == "cube" || cfg.geometry == "l_bracket" || cfg.geometry == "tetrahedron";
    if (canonical) {
        mesh = share(build_canonical(parse_shape(cfg.geometry), cfg.scale));
    } else {
        if (!fs::exists(cfg.geometry)) throw InputError("geometry: mesh file '" + cfg.geometry + "' not found");
        mesh = share(load_mesh(cfg.geometry));
    }
    for (int i = 0; i < cfg.initial_refinements; ++i) mesh = share(refine_uniform(*mesh).mesh);
    return mesh;
}

void run(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    MeshPtr mesh = initial_mesh(cfg);
    fs::create_directories(cfg.out);
    const AdaptConfig ac = cfg.adapt_config();
    nlohmann::json summary = {{"config", cfg.to_json()}};

    switch (cfg.mode) {
        case Mode::solve:
        case Mode::estimate: {
            if (mesh->num_edges() > cfg.max_dofs) throw InputError("max_dofs: initial mesh has more DOFs than allowed");
            const Solution s = solve_and_estimate(mesh, ac);
            write_solution(out_path(cfg, "solution.bin"), *mesh, s.system.x);
            if (cfg.mode == Mode::estimate) {
                write_indicators_csv(s.indicators, out_path(cfg, "indicators.csv"));
                write_indicator_vtk(out_path(cfg, vtk_name(0)), *mesh, s.indicators);
            }
            summary["result"] = solution_summary(s);
            log << "dofs " << s.rt->dofs() << "  residual " << s.system.relative_residual << "  eta "
                << s.indicators.total << '\n';
            break;
        }
        case Mode::uniform_study: {
            auto cb = [&](int iter, const Solution& s) {
                write_indicator_vtk(out_path(cfg, vtk_name(iter)), *s.mesh, s.indicators);
                log << "level " << iter << "  dofs " << s.rt->dofs() << "  eta " << s.indicators.total << '\n';
                if (iter == cfg.levels - 1) {
                    write_final(cfg, s);
                    summary["result"] = solution_summary(s);
                }
            };
            const StudyLog study = run_uniform_study(mesh, cfg.levels, ac, cb);
            study.write_csv(out_path(cfg, "study.csv"));
            study.write_timing_csv(out_path(cfg, "timing.csv"));
            summary["study"] = study_json(study);
            break;
        }
        case Mode::adapt: {
            StudyLog partial;
            auto cb = [&](int iter, const Solution& s) {
                write_indicator_vtk(out_path(cfg, vtk_name(iter)), *s.mesh, s.indicators);
                log << "iter " << iter << "  dofs " << s.rt->dofs() << "  eta " << s.indicators.total << '\n';
            };
            AdaptResult res;
            try {
                res = run_adaptive(mesh, ac, cb, &partial);
            } catch (...) {
                partial.write_csv(out_path(cfg, "study.csv"));
                partial.write_timing_csv(out_path(cfg, "timing.csv"));
                throw;
            }
            res.log.write_csv(out_path(cfg, "study.csv"));
            res.log.write_timing_csv(out_path(cfg, "timing.csv"));
            write_final(cfg, *res.final);
            summary["result"] = solution_summary(*res.final);
            summary["study"] = study_json(res.log);
            summary["stop_reason"] = res.stop_reason;
            break;
        }
    }
    write_json(out_path(cfg, "summary.json"), summary);
}

int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary element EFIE solver with residual error estimation"};
    std::string config_path, mode, out_dir;
    std::optional<int> threads;
    std::optional<double> k, theta;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--mode", mode, "solve, estimate, uniform-study or adapt");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--k", k, "wavenumber");
    app.add_option("--theta", theta, "Dorfler bulk parameter");

    std::string out_for_error;
    auto fail = [&](const char* kind, const std::string& msg, int code) {
        nlohmann::json j = {{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}};
        err << j.dump() << '\n';
        if (!out_for_error.empty()) {
            std::error_code ec;
            fs::create_directories(out_for_error, ec);
            std::ofstream f(fs::path(out_for_error) / "error.json");
            if (f) f << std::setw(2) << j << '\n';
        }
        return code;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        return fail("InputError", std::string("arguments: ") + e.what(), exit_input);
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!mode.empty()) cfg.mode = parse_mode(mode);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (threads) cfg.threads = *threads;
        if (k) cfg.k = *k;
        if (theta) cfg.theta = *theta;
        out_for_error = cfg.out;
        run(cfg, out);
        return exit_ok;
    } catch (const InputError& e) {
        return fail("InputError", e.what(), exit_input);
    } catch (const QuadratureError& e) {
        return fail("QuadratureError", e.what(), exit_numerical);
    } catch (const NumericalError& e) {
        return fail("NumericalError", e.what(), exit_numerical);
    } catch (const fs::filesystem_error& e) {
        return fail("InputError", e.what(), exit_input);
    } catch (const std::exception& e) {
        return fail("NumericalError", e.what(), exit_numerical);
    }
}

}  // namespace efie
