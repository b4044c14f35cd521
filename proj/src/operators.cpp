#include "fcsl/operators.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcsl/reduce.hpp"

namespace fcsl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> frac_symbol(const TorusGrid& grid, FractionalOrder alpha) {
    std::vector<double> m(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) {
        const int k = grid.wavenumbers[static_cast<std::size_t>(j)];
        m[static_cast<std::size_t>(j)] = (k == 0) ? 0.0 : std::pow(kTwoPi * std::abs(k), 2.0 * alpha.alpha);
    }
    return m;
}

std::vector<double> laplace_symbol(const TorusGrid& grid) {
    std::vector<double> m(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) {
        const double w = kTwoPi * grid.wavenumbers[static_cast<std::size_t>(j)];
        m[static_cast<std::size_t>(j)] = -w * w;
    }
    return m;
}

Field frac_laplacian_spectral(const Field& f, FractionalOrder alpha) {
    if (!f.all_finite()) throw PreconditionError("frac_laplacian_spectral: field has non-finite values");
    return apply_multiplier(f, frac_symbol(*f.grid, alpha));
}

Field laplacian(const Field& f) {
    return apply_multiplier(f, laplace_symbol(*f.grid));
}

double frac_kernel_constant(double alpha) {
    // |Gamma(-a)| = pi / (sin(pi a) Gamma(1+a)) for a in (0,1).
    const double pi = std::numbers::pi;
    return std::pow(4.0, alpha) * std::tgamma(0.5 + alpha) * std::sin(pi * alpha) *
           std::tgamma(1.0 + alpha) / (pi * std::sqrt(pi));
}

double kernel_mass(double a, double b, double alpha) {
    const double p = 2.0 * alpha;
    return (std::pow(a, -p) - std::pow(b, -p)) / p;
}

double periodized_frac_kernel(double z, double alpha, double z_cutoff) {
    const double p = 1.0 + 2.0 * alpha;
    const int M = std::max(4, static_cast<int>(std::ceil(z_cutoff)));
    double s = std::pow(std::abs(z), -p);
    for (int m = 1; m <= M; ++m)
        s += std::pow(m + z, -p) + std::pow(m - z, -p);
    // Image-sum tail by midpoint Euler-Maclaurin: sum_{m>M} g(m) ~
    // int_{M+1/2} g + g''(M+1/2)/24 with g(m) = (m +- z)^-p.
    const auto tail = [&](double off) {
        const double c = M + 0.5 + off;
        return std::pow(c, 1.0 - p) / (p - 1.0) + p * (p + 1.0) * std::pow(c, -p - 2.0) / 24.0;
    };
    s += tail(z) + tail(-z);
    return frac_kernel_constant(alpha) * s;
}

namespace {

// Composite Gauss-Legendre panels for z in (0, 1/2], dyadically refined
// toward the origin where the kernel is singular. The paired difference
// f(x+z)+f(x-z)-2f(x) is O(z^2), so panels below z_floor contribute less
// than roundoff and are dropped.
struct QuadScheme {
    std::vector<double> nodes;   // z locations, all panels concatenated
    std::vector<double> weights; // Gauss weight * periodized kernel at node
    std::vector<std::pair<int, int>> panels; // [begin,end) index range per panel
};

QuadScheme build_scheme(double alpha, double z_cutoff, int n_quad) {
    // Depth: panel [2^-(j+1), 2^-j]/2 contributes O((2^-j)^(2-2a)); 48 levels
    // put the dropped remainder below 1e-14 for any alpha in (0,1).
    const int levels = 48;
    const int per_panel = std::max(6, n_quad / levels);
    std::vector<double> gn, gw;
    gauss_legendre(per_panel, gn, gw);

    QuadScheme s;
    double hi = 0.5;
    for (int j = 0; j < levels; ++j) {
        const double lo = hi * 0.5;
        const int begin = static_cast<int>(s.nodes.size());
        for (int q = 0; q < per_panel; ++q) {
            const double z = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gn[static_cast<std::size_t>(q)];
            s.nodes.push_back(z);
            s.weights.push_back(0.5 * (hi - lo) * gw[static_cast<std::size_t>(q)] *
                                periodized_frac_kernel(z, alpha, z_cutoff));
        }
        s.panels.emplace_back(begin, static_cast<int>(s.nodes.size()));
        hi = lo;
    }
    return s;
}

Field quadrature_with_scheme(const Field& f, const QuadScheme& s, bool parallel) {
    const int n = f.grid->n;
    const int n_panels = static_cast<int>(s.panels.size());
    const auto raw = raw_spectrum(f);
    // One partial field per panel keeps the final reduction order fixed, so
    // results are identical for any thread count.
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_panels),
                                             std::vector<double>(static_cast<std::size_t>(n), 0.0));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int pidx = 0; pidx < n_panels; ++pidx) {
        auto [begin, end] = s.panels[static_cast<std::size_t>(pidx)];
        std::vector<double>& acc = partial[static_cast<std::size_t>(pidx)];
        for (int q = begin; q < end; ++q) {
            const double z = s.nodes[static_cast<std::size_t>(q)];
            const double w = s.weights[static_cast<std::size_t>(q)];
            const Field plus = resample_from_raw(f.grid, raw, z);
            const Field minus = resample_from_raw(f.grid, raw, -z);
            for (int i = 0; i < n; ++i)
                acc[static_cast<std::size_t>(i)] += w * (2.0 * f[i] - plus[i] - minus[i]);
        }
    }

    Field out(f.grid);
    for (int i = 0; i < n; ++i) {
        std::vector<double> terms(static_cast<std::size_t>(n_panels));
        for (int pidx = 0; pidx < n_panels; ++pidx)
            terms[static_cast<std::size_t>(pidx)] = partial[static_cast<std::size_t>(pidx)][static_cast<std::size_t>(i)];
        out[i] = pairwise_sum(terms);
    }
    return out;
}

Field quadrature_impl(const Field& f, FractionalOrder alpha, double z_cutoff, int n_quad,
                      bool parallel) {
    if (z_cutoff < 4.0)
        throw PreconditionError("frac_laplacian_quadrature: z_cutoff must cover >= 4 periods");
    if (n_quad < 1000)
        throw PreconditionError("frac_laplacian_quadrature: n_quad must be >= 1000");
    if (!f.all_finite())
        throw PreconditionError("frac_laplacian_quadrature: field has non-finite values");

    const Field coarse = quadrature_with_scheme(f, build_scheme(alpha.alpha, z_cutoff, n_quad), parallel);
    const Field fine = quadrature_with_scheme(f, build_scheme(alpha.alpha, z_cutoff, 2 * n_quad), parallel);

    double diff2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < f.grid->n; ++i) {
        const double d = fine[i] - coarse[i];
        diff2 += d * d;
        ref2 += fine[i] * fine[i];
    }
    const double scale = std::sqrt(ref2) + 1e-6 * (1.0 + lp_norm(f, 2.0));
    if (std::sqrt(diff2) > 1e-5 * scale)
        throw AccuracyError("frac_laplacian_quadrature: self-refinement disagreement");
    return fine;
}

} // namespace

Field frac_laplacian_quadrature(const Field& f, FractionalOrder alpha, double z_cutoff, int n_quad) {
    return quadrature_impl(f, alpha, z_cutoff, n_quad, true);
}

Field frac_laplacian_quadrature_serial(const Field& f, FractionalOrder alpha, double z_cutoff,
                                       int n_quad) {
    return quadrature_impl(f, alpha, z_cutoff, n_quad, false);
}

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(m), 0.0);
    weights.assign(static_cast<std::size_t>(m), 0.0);
    const double pi = std::numbers::pi;
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(m - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(m - 1 - i)] = w;
    }
}

} // namespace fcsl
