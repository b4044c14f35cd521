#include "fcsl/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fcsl/operators.hpp"
#include "fcsl/reduce.hpp"

namespace fcsl {

ZetaGrid make_zeta_grid(double zeta_min, double zeta_max, int m_levels) {
    if (!(zeta_min < zeta_max)) throw ConfigError("make_zeta_grid: empty range");
    if (m_levels < 16) throw ConfigError("make_zeta_grid: need at least 16 levels");
    ZetaGrid z;
    z.zeta_min = zeta_min;
    z.zeta_max = zeta_max;
    z.m_levels = m_levels;
    z.dzeta = (zeta_max - zeta_min) / m_levels;
    return z;
}

XZetaArray kinetic_function(const Field& u, const ZetaGrid& zgrid) {
    for (double v : u.values)
        if (v < zgrid.zeta_min || v > zgrid.zeta_max)
            throw std::domain_error("kinetic_function: zeta grid does not cover the field range");
    XZetaArray f(u.size(), zgrid.m_levels);
    for (int i = 0; i < u.size(); ++i)
        for (int j = 0; j < zgrid.m_levels; ++j)
            f.at(i, j) = (u[i] > zgrid.level_center(j)) ? 1.0 : 0.0;
    return f;
}

std::vector<double> cell_kernel_weights(const TorusGrid& grid, double alpha, double z_cutoff) {
    const int n = grid.n;
    const double dx = grid.dx;
    const double p = 2.0 * alpha;
    const int M = std::max(4, static_cast<int>(std::ceil(z_cutoff)));

    // Images at positive z for a cell offset e: intervals
    // [(e-1/2+m*n)dx, (e+1/2+m*n)dx], m >= 0. With n*dx = 1 each image is a
    // unit shift, so the image tail has a closed antiderivative in m.
    auto positive_images = [&](int e) {
        const double A = (e - 0.5) * dx;
        const double B = (e + 0.5) * dx;
        double s = 0.0;
        for (int m = 0; m <= M; ++m) s += kernel_mass(A + m, B + m, alpha);
        const double a = A + M + 0.5, b = B + M + 0.5;
        double tail;
        if (std::abs(1.0 - p) > 1e-12) {
            tail = (std::pow(b, 1.0 - p) - std::pow(a, 1.0 - p)) / ((1.0 - p) * p);
        } else {
            tail = std::log(b / a) / p;
        }
        // midpoint Euler-Maclaurin first correction for the image sum
        tail -= (std::pow(b, -1.0 - p) - std::pow(a, -1.0 - p)) / 24.0;
        return s + tail;
    };

    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    const double C = frac_kernel_constant(alpha);
    // Negative-z images for offset d coincide with positive-z images for n-d.
    for (int d = 1; d < n; ++d)
        w[static_cast<std::size_t>(d)] = C * (positive_images(d) + positive_images(n - d));
    return w;
}

namespace {

// zeta integral of |A(ub) - A(zeta)| over [lo,hi] by Gauss rules; A is
// Lipschitz, so low order is tight on one level cell.
double cell_defect_mass(const ScalarFn& A, double a_of_ub, double lo, double hi, int order) {
    static const double g2 = 0.5773502691896257;
    static const double g4n[] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
    static const double g4w[] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    if (order <= 2) {
        s = std::abs(a_of_ub - A(mid - half * g2)) + std::abs(a_of_ub - A(mid + half * g2));
        return s * half;
    }
    for (int q = 0; q < 4; ++q) s += g4w[q] * std::abs(a_of_ub - A(mid + half * g4n[q]));
    return s * half;
}

XZetaArray defect_impl(const Field& u, const ModelSpec& model, const ZetaGrid& zgrid,
                       double z_cutoff, int order, bool parallel) {
    const int n = u.size();
    const int nz = zgrid.m_levels;
    for (double v : u.values)
        if (v < zgrid.zeta_min || v > zgrid.zeta_max)
            throw std::domain_error("parabolic_defect: zeta grid does not cover the field range");

    const auto W = cell_kernel_weights(*u.grid, model.alpha.alpha, z_cutoff);
    const auto& A = model.diffusion.diffusion;
    XZetaArray out(n, nz);

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i) {
        for (int d = 1; d < n; ++d) {
            const int j = (i + d) % n;
            const double a = std::min(u[i], u[j]);
            const double b = std::max(u[i], u[j]);
            if (!(b > a)) continue; // Conv{c,c} is empty
            const double weight = W[static_cast<std::size_t>(d)];
            const double Aub = A(u[j]);
            int c0 = static_cast<int>(std::floor((a - zgrid.zeta_min) / zgrid.dzeta));
            int c1 = static_cast<int>(std::floor((b - zgrid.zeta_min) / zgrid.dzeta));
            c0 = std::clamp(c0, 0, nz - 1);
            c1 = std::clamp(c1, 0, nz - 1);
            for (int c = c0; c <= c1; ++c) {
                const double lo = std::max(a, zgrid.level_edge(c));
                const double hi = std::min(b, zgrid.level_edge(c + 1));
                if (hi <= lo) continue;
                out.at(i, c) += weight * cell_defect_mass(A, Aub, lo, hi, order) / zgrid.dzeta;
            }
        }
    }
    return out;
}

} // namespace

XZetaArray parabolic_defect(const Field& u, const ModelSpec& model, const ZetaGrid& zgrid,
                            double z_cutoff, int n_quad) {
    if (z_cutoff < 4.0) throw PreconditionError("parabolic_defect: z_cutoff must cover >= 4 periods");
    if (n_quad < 1000) throw PreconditionError("parabolic_defect: n_quad must be >= 1000");
    XZetaArray lo = defect_impl(u, model, zgrid, z_cutoff, 2, true);
    XZetaArray hi = defect_impl(u, model, zgrid, z_cutoff, 4, true);
    double dsum = 0.0, sum = 0.0;
    for (std::size_t q = 0; q < lo.v.size(); ++q) {
        dsum += std::abs(hi.v[q] - lo.v[q]);
        sum += std::abs(hi.v[q]);
    }
    if (dsum > 0.01 * sum + 1e-12)
        throw AccuracyError("parabolic_defect: quadrature refinement disagreement");
    return hi;
}

XZetaArray parabolic_defect_serial(const Field& u, const ModelSpec& model, const ZetaGrid& zgrid,
                                   double z_cutoff, int n_quad) {
    if (z_cutoff < 4.0) throw PreconditionError("parabolic_defect: z_cutoff must cover >= 4 periods");
    if (n_quad < 1000) throw PreconditionError("parabolic_defect: n_quad must be >= 1000");
    return defect_impl(u, model, zgrid, z_cutoff, 4, false);
}

double DefectEstimate::total_mass() const {
    const double cell = grid->dx * zgrid.dzeta;
    double total = 0.0;
    for (const auto& slab : density)
        for (double v : slab.v) total += v;
    return total * cell;
}

DefectEstimate estimate_defect(const Trajectory& traj, const ModelSpec& model,
                               const ZetaGrid& zgrid, double z_cutoff, int n_quad) {
    if (traj.states.size() < 2)
        throw InsufficientDataError("estimate_defect: need at least two samples");
    if (n_quad < 1000) throw PreconditionError("estimate_defect: n_quad must be >= 1000");
    DefectEstimate est;
    est.grid = traj.states.front().grid;
    est.zgrid = zgrid;
    est.times = traj.times;
    // left-endpoint density per window, time-integrated
    for (std::size_t w = 0; w + 1 < traj.states.size(); ++w) {
        const double dt_w = traj.times[w + 1] - traj.times[w];
        XZetaArray slab = defect_impl(traj.states[w], model, zgrid, z_cutoff, 4, true);
        for (double& v : slab.v) v *= dt_w;
        est.density.push_back(std::move(slab));
    }
    return est;
}

double measure_tail(const DefectEstimate& est, double L) {
    const double cell = est.grid->dx * est.zgrid.dzeta;
    double total = 0.0;
    for (const auto& slab : est.density)
        for (int i = 0; i < slab.nx; ++i)
            for (int j = 0; j < slab.nz; ++j)
                if (std::abs(est.zgrid.level_center(j)) >= L) total += slab.at(i, j);
    return total * cell;
}

void write_csv(const DefectEstimate& est, std::ostream& os) {
    os << "x_index,t_window,zeta_index,density\n";
    char buf[64];
    for (std::size_t w = 0; w < est.density.size(); ++w) {
        const auto& slab = est.density[w];
        for (int i = 0; i < slab.nx; ++i)
            for (int j = 0; j < slab.nz; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", slab.at(i, j));
                os << i << ',' << w << ',' << j << ',' << buf << '\n';
            }
    }
}

TestFunction bump_test_function(const std::function<double(double)>& rho,
                                const std::function<double(double)>& rho_prime, double center,
                                double width) {
    TestFunction t;
    t.rho = rho;
    t.rho_prime = rho_prime;
    t.psi = [center, width](double z) {
        const double s = (z - center) / width;
        if (std::abs(s) >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        return q * q * q;
    };
    t.psi_prime = [center, width](double z) {
        const double s = (z - center) / width;
        if (std::abs(s) >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        return -6.0 * s * q * q / width;
    };
    t.psi_lo = center - width;
    t.psi_hi = center + width;
    return t;
}

TestFunction mass_test_function(double plateau, double wing) {
    TestFunction t;
    t.rho = [](double) { return 1.0; };
    t.rho_prime = [](double) { return 0.0; };
    const double P = plateau, W = wing;
    auto cutoff = [P, W](double z) {
        const double a = std::abs(z);
        if (a <= P) return 1.0;
        if (a >= P + W) return 0.0;
        const double s = (a - P) / W;
        const double q = 1.0 - s * s;
        return q * q * q;
    };
    auto cutoff_prime = [P, W](double z) {
        const double a = std::abs(z);
        if (a <= P || a >= P + W) return 0.0;
        const double s = (a - P) / W;
        const double q = 1.0 - s * s;
        return -6.0 * s * q * q / W * (z >= 0.0 ? 1.0 : -1.0);
    };
    t.psi = [cutoff](double z) { return z * cutoff(z); };
    t.psi_prime = [cutoff, cutoff_prime](double z) { return cutoff(z) + z * cutoff_prime(z); };
    t.psi_lo = -(P + W);
    t.psi_hi = P + W;
    return t;
}

namespace {

// Antiderivative of g from lo, clamped to [lo,hi]: per-cell Simpson sums
// plus a 2-point Gauss finish inside the final partial cell.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> g, double lo, double hi, int cells)
        : g_(std::move(g)), lo_(lo), hi_(hi), h_((hi - lo) / cells),
          cum_(static_cast<std::size_t>(cells) + 1, 0.0) {
        for (int m = 0; m < cells; ++m) {
            const double a = lo_ + m * h_;
            const double simpson = h_ / 6.0 * (g_(a) + 4.0 * g_(a + 0.5 * h_) + g_(a + h_));
            cum_[static_cast<std::size_t>(m) + 1] = cum_[static_cast<std::size_t>(m)] + simpson;
        }
    }

    double operator()(double v) const {
        if (v <= lo_) return 0.0;
        if (v >= hi_) return cum_.back();
        const int m = std::min(static_cast<int>((v - lo_) / h_), static_cast<int>(cum_.size()) - 2);
        const double a = lo_ + m * h_;
        static const double gl = 0.5773502691896257;
        const double mid = 0.5 * (a + v), half = 0.5 * (v - a);
        return cum_[static_cast<std::size_t>(m)] + half * (g_(mid - half * gl) + g_(mid + half * gl));
    }

private:
    std::function<double(double)> g_;
    double lo_, hi_, h_;
    std::vector<double> cum_;
};

} // namespace

ResidualSeries kinetic_residual(const Trajectory& traj, const ModelSpec& model,
                                const TestFunction& phi) {
    if (traj.states.empty()) throw InsufficientDataError("kinetic_residual: empty trajectory");
    const Field& u0 = traj.states.front();
    const GridPtr grid = u0.grid;
    const int n = grid->n;
    const double dx = grid->dx;

    // Spectral images of rho are exact for the trig-polynomial test family.
    Field rho_f = sample_field(grid, phi.rho);
    Field rho_prime_f = sample_field(grid, phi.rho_prime);
    Field frac_rho = frac_laplacian_spectral(rho_f, model.alpha);
    Field lap_rho = laplacian(rho_f);

    const int cells = 4096;
    CumulativeIntegral theta_psi(phi.psi, phi.psi_lo, phi.psi_hi, cells);
    CumulativeIntegral theta_fpsi([&](double z) { return model.flux.flux_prime(z) * phi.psi(z); },
                                  phi.psi_lo, phi.psi_hi, cells);
    CumulativeIntegral theta_apsi(
        [&](double z) { return model.diffusion.diffusion_prime(z) * phi.psi(z); }, phi.psi_lo,
        phi.psi_hi, cells);

    auto bracket = [&](const Field& u, const Field& weight, const CumulativeIntegral& theta) {
        std::vector<double> terms(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) terms[static_cast<std::size_t>(i)] = weight[i] * theta(u[i]);
        return dx * pairwise_sum(terms);
    };

    ResidualSeries out;
    out.times.push_back(traj.times.front());
    out.values.push_back(0.0);
    if (traj.times.size() < 2) return out;

    SolverConfig cfg = traj.config;
    if (cfg.dt <= 0.0) throw InsufficientDataError("kinetic_residual: trajectory lacks resolved dt");
    Stepper stepper(grid, model, cfg);
    const long steps = stepper.n_steps();
    if (static_cast<long>(traj.noise_record.size()) != steps)
        throw InsufficientDataError("kinetic_residual: noise record does not match step count");

    const double f0_term = bracket(u0, rho_f, theta_psi);
    double transport = 0.0, fractional = 0.0, viscous = 0.0, noise = 0.0, ito = 0.0;

    Field u = u0;
    const int stride = std::max(cfg.sample_stride, 1);
    const double dt = stepper.dt();

    for (long s = 0; s < steps; ++s) {
        // left-endpoint quadrature of every time integral
        transport += dt * bracket(u, rho_prime_f, theta_fpsi);
        fractional += dt * bracket(u, frac_rho, theta_apsi);
        if (cfg.tau > 0.0) viscous += dt * bracket(u, lap_rho, theta_psi);

        const auto& dbeta = traj.noise_record[static_cast<std::size_t>(s)];
        if (model.noise.K > 0) {
            std::vector<double> noise_terms(static_cast<std::size_t>(n));
            std::vector<double> ito_terms(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double x = grid->cell_center(i);
                double acc = 0.0;
                for (int k = 0; k < model.noise.K; ++k)
                    acc += model.noise.h_k(k, x, u[i]) * dbeta[static_cast<std::size_t>(k)];
                noise_terms[static_cast<std::size_t>(i)] = acc * rho_f[i] * phi.psi(u[i]);
                ito_terms[static_cast<std::size_t>(i)] =
                    rho_f[i] * phi.psi_prime(u[i]) * h_norm_sq(model.noise, x, u[i]);
            }
            noise += dx * pairwise_sum(noise_terms);
            ito += 0.5 * dt * dx * pairwise_sum(ito_terms);
        }

        stepper.advance(u, dbeta, s);

        if ((s + 1) % stride == 0 || s + 1 == steps) {
            const double ft_term = bracket(u, rho_f, theta_psi);
            const double D =
                f0_term - ft_term + transport - fractional + cfg.tau * viscous + noise + ito;
            out.times.push_back(dt * static_cast<double>(s + 1));
            out.values.push_back(D);
        }
    }
    return out;
}

} // namespace fcsl
