#include "fcsl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fcsl/reduce.hpp"

namespace fcsl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double FluxSpec::max_flux_prime(double lo, double hi) const {
    double m = std::max(std::abs(flux_prime(lo)), std::abs(flux_prime(hi)));
    const int scan = 33;
    for (int i = 1; i < scan; ++i) {
        const double z = lo + (hi - lo) * i / scan;
        m = std::max(m, std::abs(flux_prime(z)));
    }
    return m;
}

double NoiseSpec::h_k(int k, double x, double u) const {
    const NoiseMode& mode = modes[static_cast<std::size_t>(k)];
    double v = mode.profile(x);
    if (mode.shape) v *= mode.shape(u);
    return v;
}

bool ModelSpec::alpha_in_wellposed_regime() const {
    if (noise.K == 0) return true; // deterministic equation
    if (!noise.depends_on_x) return alpha.alpha < 1.0;
    // Any x-dependent noise family only has well-posedness for alpha < 1/2.
    return alpha.alpha < 0.5;
}

NoiseSpec additive_noise(const std::string& family, int K, double q, double amp) {
    NoiseSpec s;
    s.kind = NoiseKind::Additive;
    s.K = K;
    s.decay_exponent = q;
    s.amplitude = amp;
    s.cancellation = true;
    s.depends_on_x = true;
    for (int k = 1; k <= K; ++k) {
        NoiseMode m;
        if (family == "mixed") {
            const int freq = (k + 1) / 2;
            const double scale = amp / std::pow(freq, q);
            if (k % 2 == 1)
                m.profile = [freq, scale](double x) { return scale * std::sin(kTwoPi * freq * x); };
            else
                m.profile = [freq, scale](double x) { return scale * std::cos(kTwoPi * freq * x); };
        } else { // "sin": h_k(x) = amp sin(2 pi k x) / k^q
            const double scale = amp / std::pow(k, q);
            m.profile = [k, scale](double x) { return scale * std::sin(kTwoPi * k * x); };
        }
        s.modes.push_back(std::move(m));
    }
    return s;
}

NoiseSpec multiplicative_noise(int K, double q, double amp) {
    // h_k(x,u) = amp sin(2 pi k x) k^-q * u/(1+u^2); bounded, Lipschitz in u.
    NoiseSpec s;
    s.kind = NoiseKind::Multiplicative;
    s.K = K;
    s.decay_exponent = q;
    s.amplitude = amp;
    s.cancellation = true;
    s.depends_on_x = true;
    for (int k = 1; k <= K; ++k) {
        NoiseMode m;
        const double scale = amp / std::pow(k, q);
        m.profile = [k, scale](double x) { return scale * std::sin(kTwoPi * k * x); };
        m.shape = [](double u) { return u / (1.0 + u * u); };
        s.modes.push_back(std::move(m));
    }
    return s;
}

ModelSpec builtin_model(const std::string& name) {
    ModelSpec m;
    m.name = name;
    m.alpha = FractionalOrder(0.3);
    m.noise = additive_noise("sin", 8, 2.0, 0.25);

    if (name == "burgers_frac") {
        m.flux.name = "burgers";
        m.flux.flux = [](double z) { return 0.5 * z * z; };
        m.flux.flux_prime = [](double z) { return z; };
        m.flux.second_derivative_bound = FluxBoundKind::Subquadratic;
        m.flux.eo_plus = [](double a) { const double p = std::max(a, 0.0); return 0.5 * p * p; };
        m.flux.eo_minus = [](double b) { const double q = std::min(b, 0.0); return 0.5 * q * q; };
        m.diffusion.name = "identity";
        m.diffusion.diffusion = [](double z) { return z; };
        m.diffusion.diffusion_prime = [](double) { return 1.0; };
        m.diffusion.lipschitz_const = 1.0;
        return m;
    }
    if (name == "linear_advection") {
        const double c = 1.0;
        m.flux.name = "linear";
        m.flux.flux = [c](double z) { return c * z; };
        m.flux.flux_prime = [c](double) { return c; };
        m.flux.second_derivative_bound = FluxBoundKind::Subquadratic;
        m.flux.eo_plus = [c](double a) { return std::max(c, 0.0) * a; };
        m.flux.eo_minus = [c](double b) { return std::min(c, 0.0) * b; };
        m.diffusion.name = "zero";
        m.diffusion.diffusion = [](double) { return 0.0; };
        m.diffusion.diffusion_prime = [](double) { return 0.0; };
        m.diffusion.lipschitz_const = 0.0;
        return m;
    }
    if (name == "degenerate_porous") {
        // Burgers flux with A = C^2-smoothed max(z,0): A' = 0 on z <= 0,
        // smoothstep ramp on (0,w), identity slope beyond.
        const double w = 0.5;
        m.flux.name = "burgers";
        m.flux.flux = [](double z) { return 0.5 * z * z; };
        m.flux.flux_prime = [](double z) { return z; };
        m.flux.second_derivative_bound = FluxBoundKind::Subquadratic;
        m.flux.eo_plus = [](double a) { const double p = std::max(a, 0.0); return 0.5 * p * p; };
        m.flux.eo_minus = [](double b) { const double q = std::min(b, 0.0); return 0.5 * q * q; };
        m.diffusion.name = "smoothed_relu";
        m.diffusion.diffusion_prime = [w](double z) {
            const double s = std::clamp(z / w, 0.0, 1.0);
            return s * s * (3.0 - 2.0 * s);
        };
        m.diffusion.diffusion = [w](double z) {
            if (z <= 0.0) return 0.0;
            if (z >= w) return z - 0.5 * w;
            const double s = z / w;
            return w * s * s * s * (1.0 - 0.5 * s);
        };
        m.diffusion.lipschitz_const = 1.0;
        return m;
    }
    throw ConfigError("builtin_model: unknown model '" + name + "'");
}

double h_norm_sq(const NoiseSpec& spec, double x, double u) {
    double s = 0.0;
    for (int k = 0; k < spec.K; ++k) {
        const double h = spec.h_k(k, x, u);
        s += h * h;
    }
    return s;
}

std::vector<double> draw_mode_increments(const NoiseSpec& spec, const PathRng& rng,
                                         std::uint64_t step) {
    std::vector<double> xi(static_cast<std::size_t>(spec.K));
    for (int k = 0; k < spec.K; ++k) xi[static_cast<std::size_t>(k)] = rng.normal(step, static_cast<std::uint32_t>(k));
    return xi;
}

Field noise_field(const NoiseSpec& spec, const Field& u, std::span<const double> dbeta) {
    if (static_cast<int>(dbeta.size()) != spec.K)
        throw ShapeError("noise_field: increment count does not match mode count");
    Field out(u.grid);
    for (int i = 0; i < u.size(); ++i) {
        const double x = u.grid->cell_center(i);
        double acc = 0.0;
        for (int k = 0; k < spec.K; ++k)
            acc += spec.h_k(k, x, u[i]) * dbeta[static_cast<std::size_t>(k)];
        out[i] = acc;
    }
    return out;
}

Field noise_increment(const NoiseSpec& spec, const Field& u, double dt,
                      std::span<const double> xi) {
    if (dt <= 0.0) throw PreconditionError("noise_increment: dt must be positive");
    std::vector<double> dbeta(xi.size());
    const double sq = std::sqrt(dt);
    for (std::size_t k = 0; k < xi.size(); ++k) dbeta[k] = sq * xi[k];
    return noise_field(spec, u, dbeta);
}

Field noise_increment(const NoiseSpec& spec, const Field& u, double dt, const PathRng& rng,
                      std::uint64_t step) {
    return noise_increment(spec, u, dt, draw_mode_increments(spec, rng, step));
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "[pass] " : "[FAIL] ") << c.id;
        if (!c.passed && !c.witness.empty()) os << "  witness: " << c.witness;
        os << '\n';
    }
    return os.str();
}

namespace {

std::string fmt_pair(double a, double b) {
    std::ostringstream os;
    os << "(" << a << ", " << b << ")";
    return os.str();
}

} // namespace

ValidationReport validate(const ModelSpec& spec, double zeta_lo, double zeta_hi, int n_samples) {
    if (!(zeta_hi > zeta_lo)) throw PreconditionError("validate: empty zeta range");
    n_samples = std::max(n_samples, 16);
    ValidationReport rep;
    std::vector<double> zs(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
        zs[static_cast<std::size_t>(i)] = zeta_lo + (zeta_hi - zeta_lo) * i / (n_samples - 1);

    { // finite-difference consistency of F' against F
        AssumptionCheck c{"flux-regularity", "F' consistent with F (finite differences)", true, ""};
        for (double z : zs) {
            const double h = 1e-5 * (1.0 + std::abs(z));
            const double fd = (spec.flux.flux(z + h) - spec.flux.flux(z)) / h;
            const double tol = 1e-3 * (1.0 + z * z);
            if (std::abs(fd - spec.flux.flux_prime(z)) > tol) {
                c.passed = false;
                c.witness = "zeta=" + std::to_string(z);
                break;
            }
        }
        rep.checks.push_back(c);
    }
    { // |F''| <= C (|zeta|+1), sampled by second differences
        AssumptionCheck c{"flux-growth", "second derivative of F grows at most linearly", true, ""};
        const double C = 10.0;
        for (double z : zs) {
            const double h = 1e-3 * (1.0 + std::abs(z));
            const double f2 = (spec.flux.flux(z + h) - 2.0 * spec.flux.flux(z) + spec.flux.flux(z - h)) / (h * h);
            if (std::abs(f2) > C * (std::abs(z) + 1.0)) {
                c.passed = false;
                c.witness = "zeta=" + std::to_string(z) + " |F''|~" + std::to_string(std::abs(f2));
                break;
            }
        }
        rep.checks.push_back(c);
    }
    { // A non-decreasing
        AssumptionCheck c{"diffusion-monotone", "A is non-decreasing", true, ""};
        for (std::size_t i = 1; i < zs.size(); ++i) {
            const double a = spec.diffusion.diffusion(zs[i - 1]);
            const double b = spec.diffusion.diffusion(zs[i]);
            if (b < a - 1e-12) {
                c.passed = false;
                c.witness = fmt_pair(zs[i - 1], zs[i]);
                break;
            }
        }
        rep.checks.push_back(c);
    }
    { // A Lipschitz with the declared constant
        AssumptionCheck c{"diffusion-lipschitz", "A is Lipschitz with declared constant", true, ""};
        const double L = spec.diffusion.lipschitz_const + 1e-9;
        for (std::size_t i = 1; i < zs.size(); ++i) {
            for (std::size_t j : {i - 1, std::size_t{0}}) {
                const double num = std::abs(spec.diffusion.diffusion(zs[i]) - spec.diffusion.diffusion(zs[j]));
                const double den = std::abs(zs[i] - zs[j]);
                if (den > 0.0 && num > L * den) {
                    c.passed = false;
                    c.witness = fmt_pair(zs[j], zs[i]);
                    break;
                }
            }
            if (!c.passed) break;
        }
        rep.checks.push_back(c);
    }
    { // |A''| <= C (|zeta|+1)
        AssumptionCheck c{"diffusion-growth", "second derivative of A grows at most linearly", true, ""};
        const double C = 10.0;
        for (double z : zs) {
            const double h = 1e-3 * (1.0 + std::abs(z));
            const double a2 = (spec.diffusion.diffusion(z + h) - 2.0 * spec.diffusion.diffusion(z) +
                               spec.diffusion.diffusion(z - h)) / (h * h);
            if (std::abs(a2) > C * (std::abs(z) + 1.0)) {
                c.passed = false;
                c.witness = "zeta=" + std::to_string(z);
                break;
            }
        }
        rep.checks.push_back(c);
    }
    { // sum_k ||h_k||^2 bounded (evaluated at u=1 for multiplicative shapes)
        AssumptionCheck c{"noise-summability", "sum of squared sup-norms of h_k is bounded", true, ""};
        double total = 0.0;
        for (int k = 0; k < spec.noise.K; ++k) {
            double sup = 0.0;
            for (int i = 0; i < 256; ++i) {
                const double x = (i + 0.5) / 256.0;
                sup = std::max(sup, std::abs(spec.noise.modes[static_cast<std::size_t>(k)].profile(x)));
            }
            total += sup * sup;
        }
        if (total > spec.noise.c0_bound) {
            c.passed = false;
            c.witness = "sum=" + std::to_string(total);
        }
        rep.checks.push_back(c);
    }
    if (spec.noise.kind == NoiseKind::Multiplicative) {
        // H^2(x,u) <= C0 (1 + u^2), sampled over the zeta range
        AssumptionCheck c{"noise-growth", "H^2(x,u) <= C0 (1+u^2)", true, ""};
        for (double u : zs) {
            for (int i = 0; i < 64; ++i) {
                const double x = (i + 0.5) / 64.0;
                if (h_norm_sq(spec.noise, x, u) > spec.noise.c0_bound * (1.0 + u * u)) {
                    c.passed = false;
                    c.witness = "x=" + std::to_string(x) + " u=" + std::to_string(u);
                    break;
                }
            }
            if (!c.passed) break;
        }
        rep.checks.push_back(c);

        // u-continuity: sum_k |h_k(x,w)-h_k(x,z)|^2 <= C min(|w-z|, |w-z|^2)
        AssumptionCheck cu{"noise-u-continuity", "modes are Lipschitz in u with bounded shape", true, ""};
        const double C = 10.0 * (spec.noise.amplitude * spec.noise.amplitude + 1.0);
        for (std::size_t i = 1; i < zs.size(); i += 7) {
            const double w = zs[i], z2 = zs[i / 2];
            double s = 0.0;
            for (int k = 0; k < spec.noise.K; ++k) {
                const double d = spec.noise.h_k(k, 0.17, w) - spec.noise.h_k(k, 0.17, z2);
                s += d * d;
            }
            const double r = std::abs(w - z2);
            if (r > 0.0 && s > C * std::min(r, r * r) + 1e-12) {
                cu.passed = false;
                cu.witness = fmt_pair(z2, w);
                break;
            }
        }
        rep.checks.push_back(cu);
    }
    if (spec.noise.cancellation && spec.noise.K > 0) {
        AssumptionCheck c{"noise-cancellation", "every h_k has zero spatial mean", true, ""};
        for (int k = 0; k < spec.noise.K; ++k) {
            std::vector<double> vals(4096);
            for (int i = 0; i < 4096; ++i)
                vals[static_cast<std::size_t>(i)] = spec.noise.modes[static_cast<std::size_t>(k)].profile((i + 0.5) / 4096.0);
            if (std::abs(pairwise_mean(vals)) > 1e-12) {
                c.passed = false;
                c.witness = "mode k=" + std::to_string(k + 1);
                break;
            }
        }
        rep.checks.push_back(c);
    }
    { // x-continuity of the noise family
        AssumptionCheck c{"noise-x-continuity", "modes are Lipschitz in x", true, ""};
        const double C = 100.0 * (spec.noise.amplitude * spec.noise.amplitude + 1.0) *
                         std::pow(kTwoPi * std::max(spec.noise.K, 1), 2.0);
        for (int i = 0; i < 32 && c.passed; ++i) {
            const double x = (i + 0.5) / 32.0, y = x + 0.013;
            double s = 0.0;
            for (int k = 0; k < spec.noise.K; ++k) {
                const double d = spec.noise.h_k(k, x, 1.0) - spec.noise.h_k(k, y, 1.0);
                s += d * d;
            }
            if (s > C * (y - x) * (y - x)) {
                c.passed = false;
                c.witness = "x=" + std::to_string(x);
            }
        }
        rep.checks.push_back(c);
    }
    { // fractional order within the regime the noise family allows
        AssumptionCheck c{"alpha-regime", "fractional order lies in the well-posed range", true, ""};
        if (!spec.alpha_in_wellposed_regime()) {
            c.passed = false;
            c.witness = "alpha=" + std::to_string(spec.alpha.alpha) +
                        " requires alpha < 1/2 for x-dependent noise";
        }
        rep.checks.push_back(c);
    }
    return rep;
}

} // namespace fcsl
