#pragma once

#include "efie/assembly.hpp"
#include "efie/kernels.hpp"
#include "efie/spaces.hpp"

#include <span>

namespace efie {

struct ResidualOptions {
    int order = 4;  ///< triangle rule degree of the sampling nodes
    EvalOptions eval;
    int threads = 1;
};

/// Samples of R = f + k^2 A_k U + grad(V_k div U) and r = curl(f + k^2 A_k U)
/// at interior quadrature nodes, element by element.
struct ResidualField {
    MeshPtr mesh;
    TriangleRule rule;
    std::vector<std::vector<CVec3>> R;  ///< per element, per node; tangential
    std::vector<std::vector<cplx>> r;
    std::vector<CVec3> R_mean;
    std::vector<cplx> r_mean;
    std::vector<double> R_norm, r_norm;  ///< L2(T) norms by the same rule
    double max_normal_leak = 0;          ///< max |R.n|/|R| before projection

    int num_elements() const { return static_cast<int>(R.size()); }
    /// L2(T) norms of R - mean and r - mean.
    double R_fluctuation(int t) const;
    double r_fluctuation(int t) const;
};

ResidualField compute_residuals(const RTSpace& rt, const CVector& U, const IncidentWave& wave,
                                const ResidualOptions& opts = {});

/// Residual field assembled from given per-node samples (tests, frozen data).
ResidualField make_residual_field(MeshPtr mesh, const TriangleRule& rule, std::vector<std::vector<CVec3>> R,
                                  std::vector<std::vector<cplx>> r);

/// int_Gamma R . v for an RT0 function v, with the sampling rule.
cplx residual_pairing(const ResidualField& res, const RTSpace& rt, const CVector& v);

/// int_Gamma r alpha for a P1 function alpha, with the sampling rule.
cplx residual_pairing(const ResidualField& res, const P1Space& p1, const CVector& alpha);

struct IndicatorSet {
    std::vector<double> eta;    ///< eta_T
    std::vector<double> osc_R;  ///< h_T^{1/2} |R - mean R|_T
    std::vector<double> osc_r;
    std::vector<double> h;
    double total = 0;           ///< (sum eta_T^2)^{1/2}

    int num_elements() const { return static_cast<int>(eta.size()); }
};

IndicatorSet compute_indicators(const ResidualField& res);

struct GlobalSummary {
    double eta = 0;
    double osc = 0;  ///< (sum osc_R^2 + osc_r^2)^{1/2}
    int dofs = 0;
    double h_max = 0;
};

GlobalSummary global_summary(const IndicatorSet& ind, int dofs = 0);

/// The three terms of |h^{1/2} R|^2 = |h^{1/2} R_0|^2 + |h^{1/2}(R - R_0)|^2
/// (and likewise for r), R_0 the elementwise mean.
struct ResidualDecomposition {
    double R_total = 0, R_mean = 0, R_osc = 0;
    double r_total = 0, r_mean = 0, r_osc = 0;
};

ResidualDecomposition decompose(const ResidualField& res);

/// CSV with header element_id,h,eta,osc_R,osc_r.
void write_indicators_csv(const IndicatorSet& ind, const std::string& path);

}  // namespace efie
