#include "fcsl/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "fcsl/reduce.hpp"

namespace fcsl {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// FFTW plan creation is not thread-safe; executing a plan on fresh arrays is.
// One c2c plan pair per grid size, created once behind a mutex with
// FFTW_ESTIMATE so planning is deterministic, plus FFTW_UNALIGNED so the
// plans accept any caller-provided buffers via the new-array interface.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
    static std::shared_mutex mu;
    static std::map<int, PlanPair> cache;
    {
        std::shared_lock lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    std::unique_lock lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

void run_fft(int n, std::complex<double>* in, std::complex<double>* out, bool forward) {
    PlanPair& p = plans_for(n);
    fftw_execute_dft(forward ? p.fwd : p.bwd, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

GridPtr make_grid(int n) {
    if (n < 8 || n > (1 << 20) || (n % 2) != 0)
        throw ConfigError("make_grid: n must be even and within [8, 2^20], got " + std::to_string(n));
    auto g = std::make_shared<TorusGrid>();
    g->n = n;
    g->length = 1.0;
    g->dx = 1.0 / n;
    g->wavenumbers.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        g->wavenumbers[static_cast<std::size_t>(j)] = (j <= n / 2) ? j : j - n;
    return g;
}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid || static_cast<int>(values.size()) != grid->n)
        throw ShapeError("Field: value length does not match grid");
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double Field::mean() const { return pairwise_mean(values); }

Field sample_field(const GridPtr& grid, const std::function<double(double)>& f) {
    Field out(grid);
    for (int i = 0; i < grid->n; ++i) out[i] = f(grid->cell_center(i));
    return out;
}

SpectralCoeffs forward_transform(const Field& f) {
    if (!f.grid || static_cast<int>(f.values.size()) != f.grid->n)
        throw ShapeError("forward_transform: field length does not match grid");
    const int n = f.grid->n;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = f[i];
    run_fft(n, in.data(), out.data(), true);
    // Cell centers sit at (i + 1/2) dx, which shows up as a phase twist per bin.
    SpectralCoeffs c{f.grid, std::move(out)};
    for (int j = 0; j < n; ++j) {
        const int k = f.grid->wavenumbers[static_cast<std::size_t>(j)];
        const double phase = -M_PI * k / n;
        c.coeff[static_cast<std::size_t>(j)] *= std::polar(1.0 / n, phase);
    }
    return c;
}

Field inverse_transform(const SpectralCoeffs& c) {
    if (!c.grid || static_cast<int>(c.coeff.size()) != c.grid->n)
        throw ShapeError("inverse_transform: coefficient length does not match grid");
    const int n = c.grid->n;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const int k = c.grid->wavenumbers[static_cast<std::size_t>(j)];
        in[static_cast<std::size_t>(j)] = c.coeff[static_cast<std::size_t>(j)] * std::polar(1.0, M_PI * k / n);
    }
    run_fft(n, in.data(), out.data(), false);
    Field f(c.grid);
    for (int i = 0; i < n; ++i) f[i] = out[static_cast<std::size_t>(i)].real();
    return f;
}

Field apply_multiplier(const Field& f, std::span<const double> multiplier) {
    if (!f.grid) throw ShapeError("apply_multiplier: field has no grid");
    const int n = f.grid->n;
    if (static_cast<int>(multiplier.size()) != n)
        throw ShapeError("apply_multiplier: multiplier length does not match grid");
    // The cell-center phase twists cancel against a real multiplier, so this
    // skips them and normalizes once on the way back.
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n)), spec(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = f[i];
    run_fft(n, buf.data(), spec.data(), true);
    const double inv_n = 1.0 / n;
    for (int j = 0; j < n; ++j) spec[static_cast<std::size_t>(j)] *= multiplier[static_cast<std::size_t>(j)] * inv_n;
    run_fft(n, spec.data(), buf.data(), false);
    Field out(f.grid);
    for (int i = 0; i < n; ++i) out[i] = buf[static_cast<std::size_t>(i)].real();
    return out;
}

std::vector<std::complex<double>> raw_spectrum(const Field& f) {
    if (!f.grid) throw ShapeError("raw_spectrum: field has no grid");
    const int n = f.grid->n;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = f[i];
    run_fft(n, in.data(), out.data(), true);
    return out;
}

Field resample_from_raw(const GridPtr& grid, const std::vector<std::complex<double>>& raw, double z) {
    const int n = grid->n;
    if (static_cast<int>(raw.size()) != n)
        throw ShapeError("resample_from_raw: spectrum length does not match grid");
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n)), buf(static_cast<std::size_t>(n));
    const double inv_n = 1.0 / n;
    for (int j = 0; j < n; ++j) {
        const int k = grid->wavenumbers[static_cast<std::size_t>(j)];
        if (k == n / 2) {
            // Nyquist as a pure cosine keeps the shifted samples real.
            spec[static_cast<std::size_t>(j)] = raw[static_cast<std::size_t>(j)] * (std::cos(kTwoPi * k * z) * inv_n);
        } else {
            spec[static_cast<std::size_t>(j)] = raw[static_cast<std::size_t>(j)] * std::polar(inv_n, kTwoPi * k * z);
        }
    }
    run_fft(n, spec.data(), buf.data(), false);
    Field out(grid);
    for (int i = 0; i < n; ++i) out[i] = buf[static_cast<std::size_t>(i)].real();
    return out;
}

Field shift_resample(const Field& f, double z) {
    return resample_from_raw(f.grid, raw_spectrum(f), z);
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
    if (f.values.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    std::vector<double> powed(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        powed[i] = std::pow(std::abs(f.values[i]), p);
    const double dx = f.grid->dx;
    return std::pow(pairwise_sum(powed) * dx, 1.0 / p);
}

} // namespace fcsl
