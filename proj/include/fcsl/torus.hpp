// Periodic spatial discretization on the unit 1-torus: grids, fields,
// physical/spectral transforms, and discrete Lp norms.
//
// Fields hold cell averages at centers x_i = (i + 1/2)/n. Spectral
// coefficients use the convention  c_k = (1/n) sum_i u_i exp(-2*pi*i*k*x_i),
// stored in FFT bin order (k = 0, 1, ..., n/2, -n/2+1, ..., -1), so a
// constant field has c_0 equal to its value and cos(2*pi*k*x) splits into
// +-k bins of 1/2 each.
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fcsl/errors.hpp"

namespace fcsl {

struct TorusGrid {
    int n = 0;             // number of cells, even, in [8, 2^20]
    double length = 1.0;   // torus period
    double dx = 0.0;       // 1/n
    std::vector<int> wavenumbers; // FFT bin order, covers {-n/2+1, ..., n/2}

    double cell_center(int i) const { return (i + 0.5) * dx; }
};

using GridPtr = std::shared_ptr<const TorusGrid>;

GridPtr make_grid(int n);

struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->n, 0.0) {}
    Field(GridPtr g, std::vector<double> v);

    int size() const { return grid ? grid->n : 0; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    bool all_finite() const;
    double mean() const;
};

// Build a field by sampling f at cell centers.
Field sample_field(const GridPtr& grid, const std::function<double(double)>& f);

struct SpectralCoeffs {
    GridPtr grid;
    std::vector<std::complex<double>> coeff; // FFT bin order, normalized by 1/n
};

SpectralCoeffs forward_transform(const Field& f);
Field inverse_transform(const SpectralCoeffs& c);

// Applies a real Fourier multiplier given per FFT bin. This is the hot path
// shared by the operators module and the solver's implicit solve.
Field apply_multiplier(const Field& f, std::span<const double> multiplier);

// Trigonometric resampling of f at the shifted points x_i + z. Exact for
// band-limited data; the Nyquist bin is interpreted as a pure cosine.
Field shift_resample(const Field& f, double z);

// Unnormalized DFT of the raw cell values, for callers that resample the
// same field at many shifts.
std::vector<std::complex<double>> raw_spectrum(const Field& f);
Field resample_from_raw(const GridPtr& grid, const std::vector<std::complex<double>>& raw, double z);

// (sum_i |u_i|^p dx)^(1/p); max_i |u_i| for p = infinity. Throws
// std::domain_error for p < 1.
double lp_norm(const Field& f, double p);

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

} // namespace fcsl
