#pragma once

#include "cmcglue/assembly.hpp"
#include "cmcglue/regions.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace cmcglue {

inline constexpr double kGamma = 1.5;
inline constexpr double kGammaPrime = 1.75;

// Transition region Lambda in chi-coordinates: x_ in [0, l] measured from C+, potential q = 4 tau cosh(2 w)
// sampled at t_ = b + x + x_ of the tau profile. The operator is f'' - m^2 f + q f per Fourier mode.
class TransitionProblem
{
public:
    // intervals = 0 picks max(64 l, 1024).
    TransitionProblem(double tau, double b = kSpectralB, int intervals = 0, bool potential = true, int modes = 8,
                      double x = 0.0, double y = 0.0);
    // Flat problem (q = 0) of a given length.
    static TransitionProblem flat(double length, int intervals = 0, int modes = 8);

    double tau() const { return tau_; }
    double b() const { return b_; }
    double length() const { return length_; }
    int intervals() const { return n_; }
    int modes() const { return modes_; }
    bool has_potential() const { return potential_; }
    double step() const { return length_ / n_; }
    double x_under(int i) const { return step() * i; }
    double x_over(int i) const { return length_ - step() * i; }
    // q at x_ (0 for flat problems).
    double q_at(double x_under) const;
    const std::vector<double>& q() const { return q_; }
    double q_sup() const;
    TransitionProblem refined() const;

private:
    TransitionProblem() = default;
    double tau_ = 0.0, b_ = 0.0, x_ = 0.0, y_ = 0.0, length_ = 0.0;
    int n_ = 0, modes_ = 8;
    bool potential_ = false;
    std::shared_ptr<const DelaunayProfile> profile_;
    std::vector<double> q_;
};

struct ModeSolution
{
    int mode = 0;
    std::vector<double> x_under;
    std::vector<double> values;
    double residual = 0.0; // max abs residual of the discrete system (finest grid used)
};

// Solves f'' - m^2 f + q f = source with f(0) = left (C+) and f(l) = right (C-). With extrapolate the solve is
// repeated on the doubled grid and combined by Richardson extrapolation at the coarse nodes.
ModeSolution dirichlet_solve(const TransitionProblem& p, int mode, double left, double right,
                             const std::function<double(double)>& source = nullptr, bool extrapolate = true);

struct EigenReport
{
    double lambda_min = 0.0;
    int mode = 0;
    double lambda_l2 = 0.0;           // lambda_min * l^2
    std::vector<double> mode_lowest;  // lowest eigenvalue per mode 0..M
    double flat_value = 0.0;          // pi^2 / l^2
    bool within_perturbation_bound = false; // |lambda_min - pi^2/l^2| <= sup q
};

// Lowest Dirichlet eigenvalue of -(f'' - m^2 f) - q f over modes 0..M (Sturm bisection, Richardson on N, 2N).
EigenReport lowest_eigenvalue(const TransitionProblem& p);

struct KernelReport
{
    std::vector<double> x_under;
    std::vector<double> V1, V2, V3;
    std::vector<double> V1_flat, V2_flat; // closed forms x^-/l and sinh(x^-)/sinh(l)
    double A1_plus = 0.0, A1_minus = 0.0, A2 = 0.0, A3 = 0.0;
    double item2 = 0.0; // weighted discrepancy norms of V1, V2, V3 against the fitted comparisons
    double item4 = 0.0;
    double item5 = 0.0;
    double max_closed_form_error = 0.0; // sup |V_i - V~_i[1, 0]| (meaningful for flat problems)
};

// V_i[Lambda, 1, 0] and the comparison constants. A1+, A1- come from the line fitted to V1 over the middle half,
// A2, A3 from the least-squares ratio to sinh(x^-)/sinh(l) over the middle half.
KernelReport kernel_solutions(const TransitionProblem& p);

struct DecayReport
{
    double gamma_hat = 0.0;
    double r2 = 0.0;
    std::vector<double> x_under;
    std::vector<double> envelope;
    bool resolved = false; // r2 >= 0.99
};

// Boundary data sum a_m cos(m theta) on C+, zero on C-; the envelope is max over theta and the decay rate comes
// from a log-linear fit over the middle half of Lambda.
DecayReport decay_measure(const TransitionProblem& p, const std::vector<std::pair<int, double>>& cos_modes);

// Samples of a solution on an (x_, theta) grid.
struct GridSolution
{
    int nx = 0;
    int nth = 0;
    std::vector<double> values; // index ix * nth + ith
    double at(int ix, int ith) const { return values[static_cast<size_t>(ix) * nth + ith]; }
};

// Full boundary problem with data sampled at nth equally spaced angles on C+ and C-, by discrete Fourier
// decomposition and per-mode solves; modes above M are rejected.
GridSolution solve_boundary_problem(const TransitionProblem& p, const std::vector<double>& plus_data,
                                    const std::vector<double>& minus_data);

// Largest amplitude of Fourier modes other than `mode` along the grid.
double mode_leakage(const GridSolution& u, int mode);

struct ApproxKernelResult
{
    std::vector<double> eigenvalues;        // eigenvalues of L_h in [-window, window], sorted
    std::vector<int> eigen_modes;           // Fourier mode of each (-1 for the central region)
    std::vector<double> kernel_eigenvalues; // up to three in the window, nearest zero
    std::vector<double> principal_angles;   // against span{f_i}, radians, sorted ascending
    int count_eps = 0;                      // eigenvalues in [-eps, eps]
    int count_window = 0;                   // eigenvalues in [-window, window]
    int unknowns = 0;
    double max_principal_angle() const;
};

// S~[p, e, n] modeled on the Delaunay profile of parameter tau: t in [(2n-2)P + b, (2n+2)P - b], operator
// (1 / (2 tau cosh 2w))(f'' - m^2 f) + 2 f per mode with Dirichlet ends, compared with f_1 = -w'/pi and
// f_{2,3} = 2 sqrt(tau) cosh(w) (cos, sin)/pi.
ApproxKernelResult approx_kernel_standard(double tau, int n, double b = kSpectralB, int intervals = 0, int modes = 8,
                                          double window = 0.5, double eps = 0.1);

// S~[p] as the round sphere minus the attachment disks with collar cylinders t in [a, 2P - b] carrying
// h = 2 tau_e cosh(2w)(dt^2 + dtheta^2); P1 elements (the Dirichlet energy is conformally invariant), Dirichlet
// at the collar ends, compared with f^_i = e_i . N / pi.
ApproxKernelResult approx_kernel_central(const InitialSurface& s, int vertex, double b = kSpectralB,
                                         int resolution = 10, double window = 0.5, double eps = 0.1);

struct SubstituteCoefficients
{
    double c[3] = {0, 0, 0};
    double gram[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}; // integral of w_i f_j dh
    double max_off_diagonal = 0.0;
};

// c_i[p, e, n] with w_i = c_i psi[2nP-1, 2nP] psi[2nP+1, 2nP] f_i on the Delaunay model of parameter tau.
SubstituteCoefficients substitute_kernel_coeffs_standard(double tau, int n, int t_nodes = 400, int nth = 64);

// c'_i with w_i[p] = c'_i psi[p] f^_i on the central sphere of `vertex`. psi[p] is 1 at distance >= 2 delta inside
// Sym[p] and 0 within delta of its boundary, where Sym[p] is the set invariant under the coordinate reflections
// that stays delta away from the removed disks.
SubstituteCoefficients substitute_kernel_coeffs_central(const InitialSurface& s, int vertex, int nz = 200, int nphi = 400);

// psi[p] at a unit vector y.
double central_window(const InitialSurface& s, int vertex, const Vec3& y);

} // namespace cmcglue
