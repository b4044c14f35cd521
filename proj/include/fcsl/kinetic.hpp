// Kinetic diagnostics: the level-set (kinetic) function, the nonlocal
// parabolic defect density, the residual of the kinetic formulation (an
// estimator of the dissipation measure), and tail-mass queries.
#pragma once

#include <iosfwd>
#include <vector>

#include "fcsl/model.hpp"
#include "fcsl/solver.hpp"

namespace fcsl {

struct ZetaGrid {
    double zeta_min = -2.0;
    double zeta_max = 2.0;
    int m_levels = 64;
    double dzeta = 0.0;

    double level_center(int j) const { return zeta_min + (j + 0.5) * dzeta; }
    double level_edge(int j) const { return zeta_min + j * dzeta; }
};

ZetaGrid make_zeta_grid(double zeta_min, double zeta_max, int m_levels);

// Dense (x, zeta) array with row-major x-first layout.
struct XZetaArray {
    int nx = 0;
    int nz = 0;
    std::vector<double> v;

    XZetaArray() = default;
    XZetaArray(int nx_, int nz_) : nx(nx_), nz(nz_), v(static_cast<std::size_t>(nx_) * nz_, 0.0) {}
    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * nz + j]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * nz + j]; }
};

// f(x_i, zeta_j) = 1 if u_i > zeta_j else 0. Throws std::domain_error when
// the grid does not cover the range of u.
XZetaArray kinetic_function(const Field& u, const ZetaGrid& zgrid);

// Nonlocal parabolic defect density eta_1(x_i, zeta_j): the kernel-weighted
// mass |A(u(x+z)) - A(zeta)| over Conv{u(x), u(x+z)}, integrated exactly in
// zeta over each level cell and divided by dzeta. Kernel weights share the
// normalization and image-summation scheme of the operators module.
XZetaArray parabolic_defect(const Field& u, const ModelSpec& model, const ZetaGrid& zgrid,
                            double z_cutoff, int n_quad);
XZetaArray parabolic_defect_serial(const Field& u, const ModelSpec& model, const ZetaGrid& zgrid,
                                   double z_cutoff, int n_quad);

// Kernel cell weights W(d) = C(1,a) * sum over periodic images of the kernel
// mass seen by a cell at offset d; used by the defect kernel and tests.
std::vector<double> cell_kernel_weights(const TorusGrid& grid, double alpha, double z_cutoff);

// Time-integrated defect estimate on (x, t-window, zeta) cells.
struct DefectEstimate {
    GridPtr grid;
    ZetaGrid zgrid;
    std::vector<double> times;           // window boundaries, size n_windows+1
    std::vector<XZetaArray> density;     // one slab per window

    double total_mass() const;
};

DefectEstimate estimate_defect(const Trajectory& traj, const ModelSpec& model,
                               const ZetaGrid& zgrid, double z_cutoff, int n_quad);

// Estimated mass on the torus x [0,T] x {|zeta| >= L}.
double measure_tail(const DefectEstimate& est, double L);

// CSV rows: x_index, t_window, zeta_index, density.
void write_csv(const DefectEstimate& est, std::ostream& os);

// Tensor-product test function phi(x, zeta) = rho(x) psi(zeta) with
// compactly supported psi. rho and its derivatives are supplied analytically
// (trig polynomials in practice).
struct TestFunction {
    std::function<double(double)> rho;
    std::function<double(double)> rho_prime;
    std::function<double(double)> psi;
    std::function<double(double)> psi_prime;
    double psi_lo = -1.0;
    double psi_hi = 1.0;
};

// C^2 bump psi(z) = (1 - ((z-c)/w)^2)^3 on |z-c| <= w.
TestFunction bump_test_function(const std::function<double(double)>& rho,
                                const std::function<double(double)>& rho_prime, double center,
                                double width);

// psi(z) = z * theta(z) with a C^2 cutoff theta == 1 on [-plateau, plateau],
// 0 beyond plateau+wing: the residual against this test function reads off
// the total dissipation mass on the solution range.
TestFunction mass_test_function(double plateau, double wing);

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> values; // D(t): estimated m(d_zeta phi)([0,t])
};

// Walks the recorded path step by step (bit-exact replay) and accumulates
// every term of the kinetic formulation; the residual closing the identity
// estimates the dissipation measure applied to d_zeta phi. Throws
// InsufficientDataError when the trajectory lacks its noise record.
ResidualSeries kinetic_residual(const Trajectory& traj, const ModelSpec& model,
                                const TestFunction& phi);

} // namespace fcsl
