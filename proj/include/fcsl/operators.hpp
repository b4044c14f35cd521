// Nonlocal operators on the torus: the fractional Laplacian (spectral
// implementation plus an independent singular-integral quadrature) and the
// classical Laplacian used by the viscous term.
#pragma once

#include <vector>

#include "fcsl/torus.hpp"

namespace fcsl {

struct FractionalOrder {
    double alpha;
    explicit FractionalOrder(double a) : alpha(a) {
        if (!(a > 0.0 && a < 1.0))
            throw std::domain_error("FractionalOrder: alpha must lie in (0,1)");
    }
};

// Fourier symbol of (-Delta)^alpha per bin: (2*pi*|k|)^(2*alpha), zero at k=0.
std::vector<double> frac_symbol(const TorusGrid& grid, FractionalOrder alpha);

// Symbol of Delta per bin: -(2*pi*k)^2.
std::vector<double> laplace_symbol(const TorusGrid& grid);

Field frac_laplacian_spectral(const Field& f, FractionalOrder alpha);
Field laplacian(const Field& f);

// Normalization constant C(1,alpha) = 4^alpha Gamma(1/2+alpha) /
// (sqrt(pi) |Gamma(-alpha)|) making the kernel |z|^-(1+2*alpha) match the
// spectral symbol.
double frac_kernel_constant(double alpha);

// Kernel periodized over torus images: C(1,alpha) * sum_m |z+m|^-(1+2a).
// Images with |m| <= z_cutoff are summed explicitly, the remainder is folded
// in through an analytic tail of the image sum.
double periodized_frac_kernel(double z, double alpha, double z_cutoff);

// Principal-value quadrature of the singular integral. Pairs +-z so the
// integrand is O(z^(2-2a)) at the origin, then integrates against the
// periodized kernel with composite Gauss rules on dyadically refined
// subintervals. Throws AccuracyError when self-refinement disagrees.
//
// z_cutoff: number of torus periods handled by explicit image summation
// (>= 4); n_quad: total quadrature node budget (>= 1000).
Field frac_laplacian_quadrature(const Field& f, FractionalOrder alpha, double z_cutoff, int n_quad);

// Serial reference for the OpenMP kernel above; kept for testing and for the
// benchmark target. Must produce bit-identical output.
Field frac_laplacian_quadrature_serial(const Field& f, FractionalOrder alpha, double z_cutoff,
                                       int n_quad);

// Integral of the raw kernel |z|^-(1+2a) over [a,b], 0 < a < b.
double kernel_mass(double a, double b, double alpha);

// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace fcsl
