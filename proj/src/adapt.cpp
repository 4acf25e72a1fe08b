#include "efie/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace efie {

std::vector<int> mark_dorfler(std::span<const double> eta, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw InputError("theta must lie in (0, 1]");
    const int n = static_cast<int>(eta.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
    double total = 0.0;
    for (int i : order) total += eta[i] * eta[i];
    std::vector<int> marked;
    if (total <= 0.0) return marked;
    const double goal = theta * total;
    double sum = 0.0;
    for (int i : order) {
        if (sum >= goal || eta[i] <= 0.0) break;
        marked.push_back(i);
        sum += eta[i] * eta[i];
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

Solution solve_and_estimate(MeshPtr mesh, const AdaptConfig& cfg, bool static_blocks) {
    cfg.wave.validate();
    Solution s;
    s.mesh = mesh;
    s.rt = std::make_shared<const RTSpace>(mesh);
    AssemblyOptions ao;
    ao.orders = cfg.orders;
    ao.threads = cfg.threads;
    ao.static_blocks = static_blocks;
    s.blocks = assemble_blocks(*s.rt, cfg.wave.k, ao);
    s.system.A = s.blocks.matrix();
    s.system.b = assemble_rhs(*s.rt, cfg.wave, cfg.orders.rhs);
    s.system.k = cfg.wave.k;
    s.system.orders = cfg.orders;
    solve(s.system);
    // the dynamic blocks are not needed past this point
    s.blocks.Dk.resize(0, 0);
    s.blocks.Mk.resize(0, 0);
    ResidualOptions ro;
    ro.order = cfg.orders.residual;
    ro.eval = cfg.eval;
    ro.threads = cfg.threads;
    s.residual = compute_residuals(*s.rt, s.system.x, cfg.wave, ro);
    s.indicators = compute_indicators(s.residual);
    return s;
}

void StudyLog::append(const StudyRow& row) {
    if (!rows.empty() && row.dofs < rows.back().dofs) throw NumericalError("study log dofs must not decrease");
    rows.push_back(row);
}

void StudyLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "iter,elements,dofs,h_max,eta,osc,marked,effectivity\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.iter << ',' << r.elements << ',' << r.dofs << ',' << r.h_max << ',' << r.eta << ',' << r.osc << ','
            << r.marked << ',';
        if (r.effectivity) out << *r.effectivity;
        out << '\n';
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

void StudyLog::write_timing_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "iter,wall_seconds\n";
    for (const auto& r : rows) out << r.iter << ',' << r.wall_seconds << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

StudyRow make_row(int iter, const Solution& s) {
    const GlobalSummary g = global_summary(s.indicators, s.rt->dofs());
    StudyRow row;
    row.iter = iter;
    row.elements = s.mesh->num_triangles();
    row.dofs = g.dofs;
    row.h_max = g.h_max;
    row.eta = g.eta;
    row.osc = g.osc;
    return row;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

AdaptResult run_adaptive(MeshPtr mesh0, const AdaptConfig& cfg, const IterationCallback& cb, StudyLog* partial) {
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw InputError("theta must lie in (0, 1]");
    if (cfg.max_iters < 0) throw InputError("max_iters must be nonnegative");
    if (cfg.max_dofs <= 0) throw InputError("max_dofs must be positive");
    AdaptResult result;
    MeshPtr mesh = std::move(mesh0);
    if (mesh->num_edges() > cfg.max_dofs) throw InputError("initial mesh exceeds max_dofs");
    for (int iter = 0;; ++iter) {
        const auto t0 = Clock::now();
        Solution s = solve_and_estimate(mesh, cfg);
        StudyRow row = make_row(iter, s);
        result.meshes.push_back(mesh);
        MeshPtr next;
        if (iter < cfg.max_iters) {
            const auto marked = mark_dorfler(s.indicators.eta, cfg.theta);
            row.marked = static_cast<int>(marked.size());
            if (!marked.empty()) next = share(refine_marked(*mesh, marked).mesh);
        }
        row.wall_seconds = seconds_since(t0);
        result.log.append(row);
        if (partial) *partial = result.log;
        if (cb) cb(iter, s);
        result.final = std::move(s);
        if (iter >= cfg.max_iters) {
            result.stop_reason = "max_iters";
            break;
        }
        if (!next) {
            result.stop_reason = "nothing marked";
            break;
        }
        if (next->num_edges() > cfg.max_dofs) {
            result.stop_reason = "max_dofs";
            break;
        }
        mesh = std::move(next);
    }
    return result;
}

StudyLog run_uniform_study(MeshPtr mesh0, int levels, const AdaptConfig& cfg, const IterationCallback& cb) {
    if (levels < 1) throw InputError("levels must be at least 1");
    StudyLog log;
    MeshPtr mesh = std::move(mesh0);
    std::optional<Solution> prev;
    std::optional<RefinementResult> prev_ref;
    std::vector<StudyRow> rows;
    for (int level = 0; level < levels; ++level) {
        const auto t0 = Clock::now();
        Solution s = solve_and_estimate(mesh, cfg, level > 0);
        StudyRow row = make_row(level, s);
        if (prev) {
            const CVector fine = prolongate_rt(*prev->rt, prev->system.x, *s.rt, *prev_ref);
            const double e = energy_surrogate(s.blocks, s.system.x - fine);
            rows.back().effectivity = e > 0.0 ? rows.back().eta / std::sqrt(e) : std::nan("");
        }
        std::optional<RefinementResult> ref;
        if (level + 1 < levels) {
            ref = refine_uniform(*mesh);
            row.marked = row.elements;
        }
        row.wall_seconds = seconds_since(t0);
        rows.push_back(row);
        if (cb) cb(level, s);
        if (ref) mesh = share(ref->mesh);
        prev = std::move(s);
        prev_ref = std::move(ref);
    }
    for (const auto& r : rows) log.append(r);
    return log;
}

}  // namespace efie
