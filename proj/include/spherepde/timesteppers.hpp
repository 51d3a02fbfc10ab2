#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "spherepde/linsolve.hpp"
#include "spherepde/phi_functions.hpp"
#include "spherepde/problem_spec.hpp"

namespace spherepde {

enum class Scheme { Etdrk4Cf, Etdrk4Eig, ImexBdf4, Lirk4 };

const char* scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// IMEX-BDF4 and ETDRK4-CF are unusable when the spectrum sits on the
/// imaginary axis (BDF4 stability region / rational approximation of an
/// oscillatory exponential).
bool scheme_supports_dispersive(Scheme s);

struct SchemeConfig {
    Scheme scheme = Scheme::Lirk4;
    double h = 0.01;
    double t0 = 0.0;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    int cf_poles = 12;
    int contour_points = 32;
    bool dealias = false;  // 2/3-rule truncation of nonlinear evaluations
};

/// Nonlinear term in coefficient space: inverse transform, apply g pointwise,
/// transform back.  A null g short-circuits to zero without transforms.
class NonlinearOp {
  public:
    NonlinearOp(PointwiseNonlinearity g, GridSpec spec, bool dealias = false);

    CoeffGrid operator()(const CoeffGrid& c) const;
    bool is_zero() const { return !g_; }

  private:
    PointwiseNonlinearity g_;
    GridSpec spec_;
    bool dealias_ = false;
};

/// Multistep state: u at the newest step plus up to three older
/// (u, N(u)) pairs, newest first.
struct StepState {
    CoeffGrid u;
    std::vector<std::pair<CoeffGrid, CoeffGrid>> history;
};

/// One Cox-Matthews ETDRK4 step; 4 nonlinear evaluations, 9 phi-actions.
CoeffGrid etdrk4_step(const CoeffGrid& u, double h, PhiProvider& phi, const NonlinearOp& N);

/// One IMEX-BDF4 step.  state.history must hold the last four (u, N(u))
/// pairs; on return the history is rotated and state.u advanced.  factor
/// must be the (25, -12h) factorization.
CoeffGrid imex_bdf4_step(StepState& state, double h, const BlockPencil& pencil,
                         const BlockLU& factor, const NonlinearOp& N);

/// Fill a 3-deep multistep history with ETDRK4-CF startup steps.
void imex_bdf4_start(StepState& state, double h, const BlockPencil& pencil, PhiProvider& phi,
                     const NonlinearOp& N);

/// One LIRK4 step; five stage solves against the (1, -h/4) factorization
/// plus one T_sin2 solve for the final operator application.
CoeffGrid lirk4_step(const CoeffGrid& u, double h, const BlockPencil& pencil,
                     const BlockLU& stage_factor, const NonlinearOp& N);

struct Snapshot {
    double t = 0.0;
    CoeffGrid coeffs;
    double pole_res = 0.0;
    double sym_res = 0.0;
};

struct StepStats {
    long long steps = 0;
    long long ffts = 0;
    long long block_solves = 0;
    long long eig_matvecs = 0;
    double precompute_seconds = 0.0;
    double stepping_seconds = 0.0;
};

struct IntegrationResult {
    CoeffGrid final_coeffs;
    std::vector<Snapshot> snapshots;
    StepStats stats;
};

/// March the problem from t0 to t_end.  t_end - t0 must be an integral
/// number of steps, and snapshot times must land on step boundaries.
IntegrationResult integrate(const ProblemSpec& problem, const SchemeConfig& config,
                            const GridSpec& spec);

}  // namespace spherepde
