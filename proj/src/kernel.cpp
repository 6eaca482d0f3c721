#include "matern/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "matern/error.hpp"
#include "profiles.hpp"

namespace matern {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

bool is_half(double nu, double target) { return std::abs(nu - target) < 1e-12; }

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be finite, got " << v;
        fail(ErrorKind::InvalidInput, os.str());
    }
}

void require_same_dim(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        std::ostringstream os;
        os << "dimension mismatch: " << x.size() << " vs " << y.size();
        fail(ErrorKind::InvalidInput, os.str());
    }
}

double distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Untapered radial profile, no argument checks.
double base_profile(const KernelSpec& spec, double tau) {
    if (spec.family == KernelFamily::Gaussian) return detail::Gaussian{spec.h}.radial(tau);
    if (is_half(spec.nu, 0.5)) return detail::Matern12{spec.h}.radial(tau);
    if (is_half(spec.nu, 1.5)) return detail::Matern32{spec.h}.radial(tau);
    return detail::Matern52{spec.h}.radial(tau);
}

// Phi'(tau)/tau of the untapered profile.
double base_derivative_over_tau(const KernelSpec& spec, double tau) {
    const double h2 = spec.h * spec.h;
    if (spec.family == KernelFamily::Gaussian) {
        const double r = tau / spec.h;
        return -std::exp(-0.5 * r * r) / h2;
    }
    if (is_half(spec.nu, 1.5)) {
        const double a = kSqrt3 * tau / spec.h;
        return -3.0 / h2 * std::exp(-a);
    }
    const double a = kSqrt5 * tau / spec.h;
    return -5.0 / (3.0 * h2) * (1.0 + a) * std::exp(-a);
}

}  // namespace

KernelSpec KernelSpec::matern(double nu, double h) {
    KernelSpec s{KernelFamily::Matern, nu, h, std::nullopt};
    s.validate();
    return s;
}

KernelSpec KernelSpec::gaussian(double h) {
    KernelSpec s{KernelFamily::Gaussian, std::numeric_limits<double>::infinity(), h, std::nullopt};
    s.validate();
    return s;
}

KernelSpec KernelSpec::arc_cosine() {
    return KernelSpec{KernelFamily::ArcCosine, 0.0, 1.0, std::nullopt};
}

KernelSpec KernelSpec::with_taper(double h_prime, double nu_prime) const {
    KernelSpec s = *this;
    s.taper = Taper{nu_prime, h_prime > 0.0 ? h_prime : 4.0 * h};
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (family != KernelFamily::ArcCosine) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            fail(ErrorKind::InvalidInput, "kernel bandwidth h must be positive and finite");
        }
    }
    if (family == KernelFamily::Matern &&
        !(is_half(nu, 0.5) || is_half(nu, 1.5) || is_half(nu, 2.5))) {
        std::ostringstream os;
        os << "Matern smoothness must be 1/2, 3/2 or 5/2, got " << nu;
        fail(ErrorKind::InvalidInput, os.str());
    }
    if (taper) {
        if (!(taper->h_prime > 0.0) || !std::isfinite(taper->h_prime)) {
            fail(ErrorKind::InvalidInput, "taper cutoff h' must be positive");
        }
        if (!(taper->nu_prime >= 1.0) || !std::isfinite(taper->nu_prime)) {
            fail(ErrorKind::InvalidInput, "taper exponent nu' must be >= 1");
        }
    }
}

bool KernelSpec::has_analytic_gradient() const {
    if (family == KernelFamily::Gaussian) return true;
    if (family == KernelFamily::ArcCosine) return false;
    return nu > 1.0;
}

std::string KernelSpec::key() const {
    switch (family) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::ArcCosine: return "arccos";
        case KernelFamily::Matern:
            if (is_half(nu, 0.5)) return "matern12";
            if (is_half(nu, 1.5)) return "matern32";
            return "matern52";
    }
    return "unknown";
}

KernelSpec KernelSpec::from_key(std::string_view key, double h) {
    if (key == "matern12") return matern(0.5, h);
    if (key == "matern32") return matern(1.5, h);
    if (key == "matern52") return matern(2.5, h);
    if (key == "gaussian") return gaussian(h);
    if (key == "arccos") return arc_cosine();
    fail(ErrorKind::InvalidInput,
         "unknown kernel '" + std::string(key) +
             "' (expected matern12, matern32, matern52, gaussian or arccos)");
}

double eval_matern(const KernelSpec& spec, double tau) {
    require_finite(tau, "tau");
    if (spec.family != KernelFamily::Matern) {
        fail(ErrorKind::InvalidInput, "eval_matern requires a Matern spec");
    }
    if (tau < 0.0) fail(ErrorKind::InvalidInput, "tau must be nonnegative");
    return base_profile(spec, tau);
}

double eval_gaussian(double h, double tau) {
    require_finite(tau, "tau");
    if (!(h > 0.0)) fail(ErrorKind::InvalidInput, "h must be positive");
    if (tau < 0.0) fail(ErrorKind::InvalidInput, "tau must be nonnegative");
    const double r = tau / h;
    return std::exp(-0.5 * r * r);
}

double eval_arc_cosine(std::span<const double> x, std::span<const double> y) {
    require_same_dim(x, y);
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
    double wedge2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        xy += x[i] * y[i];
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double w = x[i] * y[j] - x[j] * y[i];
            wedge2 += w * w;
        }
    }
    require_finite(xx + yy + xy, "arc-cosine argument");
    if (xx == 0.0 || yy == 0.0) return 0.0;
    return detail::arc_cosine_value(xx, yy, std::sqrt(wedge2), xy);
}

double eval_taper(double nu_prime, double h_prime, double tau) {
    require_finite(tau, "tau");
    require_finite(nu_prime, "nu'");
    require_finite(h_prime, "h'");
    if (!(h_prime > 0.0)) fail(ErrorKind::InvalidInput, "taper cutoff h' must be positive");
    if (tau >= h_prime) return 0.0;
    return std::pow(1.0 - tau / h_prime, nu_prime);
}

double radial_profile(const KernelSpec& spec, double tau) {
    double v = base_profile(spec, tau);
    if (spec.taper) {
        if (tau >= spec.taper->h_prime) return 0.0;
        v *= std::pow(1.0 - tau / spec.taper->h_prime, spec.taper->nu_prime);
    }
    return v;
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    require_same_dim(x, y);
    if (spec.family == KernelFamily::ArcCosine) {
        double v = eval_arc_cosine(x, y);
        if (spec.taper) v *= eval_taper(spec.taper->nu_prime, spec.taper->h_prime, distance(x, y));
        return v;
    }
    const double tau = distance(x, y);
    require_finite(tau, "point coordinates");
    return radial_profile(spec, tau);
}

double radial_derivative_over_tau(const KernelSpec& spec, double tau) {
    if (!spec.has_analytic_gradient()) {
        fail(ErrorKind::UnsupportedGradient,
             "analytic gradient unavailable for kernel '" + spec.key() +
                 "'; use central differences");
    }
    const double d = base_derivative_over_tau(spec, tau);
    if (!spec.taper) return d;
    const double hp = spec.taper->h_prime;
    const double np = spec.taper->nu_prime;
    if (tau >= hp) return 0.0;
    // The taper has a cone at the origin; use the zero subgradient there.
    if (tau == 0.0) return 0.0;
    const double u = 1.0 - tau / hp;
    const double taper = std::pow(u, np);
    const double taper_d = -np / hp * std::pow(u, np - 1.0);
    return d * taper + base_profile(spec, tau) * taper_d / tau;
}

Eigen::VectorXd kernel_gradient(const KernelSpec& spec, std::span<const double> x,
                                std::span<const double> y) {
    require_same_dim(x, y);
    const double tau = distance(x, y);
    require_finite(tau, "point coordinates");
    const double scale = radial_derivative_over_tau(spec, tau);
    Eigen::VectorXd g(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) g[static_cast<Eigen::Index>(i)] = scale * (x[i] - y[i]);
    return g;
}

double matern_spectral_constant(int d, double nu) {
    const double half_d = 0.5 * d;
    return std::pow(2.0, d) * std::pow(std::numbers::pi, half_d) *
           std::exp(std::lgamma(nu + half_d) - std::lgamma(nu)) * std::pow(2.0 * nu, nu);
}

SpectralParams SpectralParams::make(int d, double nu, double h) {
    if (d < 1) fail(ErrorKind::InvalidInput, "dimension must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        fail(ErrorKind::Unsupported, "spectral density requires finite nu > 0");
    }
    if (!(h > 0.0)) fail(ErrorKind::InvalidInput, "h must be positive");
    return SpectralParams{d, nu, h, matern_spectral_constant(d, nu)};
}

double spectral_density(const SpectralParams& p, std::span<const double> omega) {
    if (!std::isfinite(p.nu)) {
        fail(ErrorKind::Unsupported, "use gaussian_spectral_density for nu = infinity");
    }
    if (static_cast<int>(omega.size()) != p.d) {
        fail(ErrorKind::InvalidInput, "frequency dimension does not match d");
    }
    double w2 = 0.0;
    for (double w : omega) w2 += w * w;
    const double two_pi = 2.0 * std::numbers::pi;
    const double base = 2.0 * p.nu / (p.h * p.h) + two_pi * two_pi * w2;
    return std::pow(p.h, -2.0 * p.nu) * p.c_dnu * std::pow(base, -(p.nu + 0.5 * p.d));
}

double gaussian_spectral_density(int d, double h, std::span<const double> omega) {
    double w2 = 0.0;
    for (double w : omega) w2 += w * w;
    const double pi = std::numbers::pi;
    return std::pow(2.0 * pi, 0.5 * d) * std::pow(h, d) * std::exp(-2.0 * pi * pi * h * h * w2);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointMatrix& x, const PointMatrix& y) {
    if (x.cols() != y.cols()) fail(ErrorKind::InvalidInput, "gram_matrix: dimension mismatch");
    const Eigen::Index n = x.rows();
    const Eigen::Index m = y.rows();
    Eigen::MatrixXd k(n, m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) k(i, j) = eval_kernel(spec, row_span(x, i), row_span(y, j));
    }
    return k;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointMatrix& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) k(i, j) = eval_kernel(spec, row_span(x, i), row_span(x, j));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) k(i, j) = k(j, i);
    }
    return k;
}

}  // namespace matern
