#pragma once

#include "efie/assembly.hpp"
#include "efie/estimator.hpp"
#include "efie/mesh.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace efie {

/// Greedy Dorfler marking: elements sorted by eta_T descending (ties by
/// index), taken until their squared sum reaches theta times the total.
/// Returned indices are sorted ascending.
std::vector<int> mark_dorfler(std::span<const double> eta, double theta);

struct AdaptConfig {
    double theta = 0.5;
    int max_iters = 4;
    int max_dofs = 20000;
    IncidentWave wave;
    QuadOrders orders;
    EvalOptions eval;
    int threads = 1;
};

/// One solve-and-estimate pass on a fixed mesh.
struct Solution {
    MeshPtr mesh;
    std::shared_ptr<const RTSpace> rt;
    ComplexDenseSystem system;
    EfieBlocks blocks;  ///< static blocks only when requested
    ResidualField residual;
    IndicatorSet indicators;
};

Solution solve_and_estimate(MeshPtr mesh, const AdaptConfig& cfg, bool static_blocks = false);

struct StudyRow {
    int iter = 0;
    int elements = 0;
    int dofs = 0;
    double h_max = 0;
    double eta = 0;
    double osc = 0;
    int marked = 0;
    std::optional<double> effectivity;
    double wall_seconds = 0;  ///< excluded from the CSV so that it stays reproducible
};

struct StudyLog {
    std::vector<StudyRow> rows;

    void append(const StudyRow& row);
    /// Columns iter,elements,dofs,h_max,eta,osc,marked,effectivity.
    void write_csv(const std::string& path) const;
    void write_timing_csv(const std::string& path) const;
};

/// Called after every iteration with the iteration index and its solution.
using IterationCallback = std::function<void(int iter, const Solution&)>;

struct AdaptResult {
    StudyLog log;
    std::optional<Solution> final;
    std::vector<MeshPtr> meshes;  ///< mesh of every iteration
    std::string stop_reason;
};

/// SOLVE -> ESTIMATE -> MARK -> REFINE until max_iters refinements or the
/// DOF budget is reached. Errors propagate after the partial log is kept in
/// `partial` when given.
AdaptResult run_adaptive(MeshPtr mesh0, const AdaptConfig& cfg, const IterationCallback& cb = {},
                         StudyLog* partial = nullptr);

/// `levels` uniform levels starting from mesh0. The effectivity of level L
/// uses the solution of level L+1 and is absent on the last row.
StudyLog run_uniform_study(MeshPtr mesh0, int levels, const AdaptConfig& cfg, const IterationCallback& cb = {});

}  // namespace efie
