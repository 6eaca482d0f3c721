#include "matern/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include "matern/error.hpp"

namespace matern {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::pair<double, double>> tabulate(double omega_max, int steps,
                                                const std::function<double(double)>& density) {
    if (steps < 2) fail(ErrorKind::InvalidInput, "spectrum_table: steps must be >= 2");
    if (!(omega_max > 0.0) || !std::isfinite(omega_max)) {
        fail(ErrorKind::InvalidInput, "spectrum_table: omega_max must be positive");
    }
    std::vector<std::pair<double, double>> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double w = omega_max * static_cast<double>(i) / static_cast<double>(steps - 1);
        rows.emplace_back(w, density(w));
    }
    return rows;
}

}  // namespace

std::vector<std::pair<double, double>> spectrum_table(const SpectralParams& params, double omega_max,
                                                      int steps) {
    std::vector<double> omega(static_cast<std::size_t>(params.d), 0.0);
    return tabulate(omega_max, steps, [&](double w) {
        omega[0] = w;
        return spectral_density(params, omega);
    });
}

std::vector<std::pair<double, double>> spectrum_table(const KernelSpec& spec, int d, double omega_max,
                                                      int steps) {
    spec.validate();
    if (d < 1) fail(ErrorKind::InvalidInput, "spectrum_table: d must be >= 1");
    switch (spec.family) {
        case KernelFamily::Matern:
            return spectrum_table(SpectralParams::make(d, spec.nu, spec.h), omega_max, steps);
        case KernelFamily::Gaussian: {
            std::vector<double> omega(static_cast<std::size_t>(d), 0.0);
            return tabulate(omega_max, steps, [&](double w) {
                omega[0] = w;
                return gaussian_spectral_density(d, spec.h, omega);
            });
        }
        case KernelFamily::ArcCosine:
            break;
    }
    fail(ErrorKind::Unsupported, "the arc-cosine kernel is not stationary and has no spectral density");
}

EdrFit fit_decay(const Eigen::VectorXd& eigenvalues_desc, IndexWindow window) {
    const auto n = static_cast<int>(eigenvalues_desc.size());
    if (window.first == 0 && window.last == 0) window = {std::max(1, n / 10), n / 2};
    if (window.first < 1 || window.last > n || window.last - window.first < 1) {
        std::ostringstream os;
        os << "eigenvalue window [" << window.first << ", " << window.last << "] is invalid for n=" << n;
        fail(ErrorKind::InvalidInput, os.str());
    }
    const int count = window.last - window.first + 1;
    Eigen::VectorXd xs(count);
    Eigen::VectorXd ys(count);
    for (int s = window.first; s <= window.last; ++s) {
        const double lam = eigenvalues_desc[s - 1];
        if (!(lam > 0.0)) {
            std::ostringstream os;
            os << "eigenvalue " << s << " is not positive (" << lam << "); narrow the tail window";
            fail(ErrorKind::Numeric, os.str());
        }
        xs[s - window.first] = std::log(static_cast<double>(s));
        ys[s - window.first] = std::log(lam);
    }
    const double mx = xs.mean();
    const double my = ys.mean();
    const double sxy = ((xs.array() - mx) * (ys.array() - my)).sum();
    const double sxx = (xs.array() - mx).square().sum();
    const double syy = (ys.array() - my).square().sum();

    EdrFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = (ys.array() - (fit.intercept + fit.slope * xs.array())).square().sum();
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.eigenvalues_used = window;
    fit.eigenvalues = eigenvalues_desc;
    return fit;
}

EdrFit empirical_edr(const KernelSpec& spec, int n, int d, std::uint64_t seed, IndexWindow window) {
    spec.validate();
    if (n < 256) fail(ErrorKind::InvalidInput, "empirical_edr: n must be >= 256");
    if (d < 1 || d > 3) fail(ErrorKind::InvalidInput, "empirical_edr: d must be 1, 2 or 3");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PointMatrix x(n, d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) x(i, c) = uni(rng);
    }
    Eigen::MatrixXd k = gram_matrix(spec, x);
    k /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigendecomposition did not converge");
    const Eigen::VectorXd desc = solver.eigenvalues().reverse();
    return fit_decay(desc, window);
}

namespace {

void require_rff_args(std::span<const double> x, std::span<const double> y, std::int64_t num_features) {
    if (x.size() != y.size() || x.empty()) fail(ErrorKind::InvalidInput, "rff: x and y must share a dimension");
    if (num_features < 1) fail(ErrorKind::InvalidInput, "rff: num_features must be >= 1");
}

// One feature: d standard normals, one chi-square with 2 nu degrees of freedom,
// then the phase. The frequency written to omega is angular.
struct MaternFeatureSampler {
    int d;
    double nu;
    double h;
    std::normal_distribution<double> gauss{0.0, 1.0};
    std::chi_squared_distribution<double> chi2;
    std::uniform_real_distribution<double> phase{0.0, kTwoPi};

    MaternFeatureSampler(int d_, double nu_, double h_) : d(d_), nu(nu_), h(h_), chi2(2.0 * nu_) {}

    double draw(std::mt19937_64& rng, double* omega) {
        for (int c = 0; c < d; ++c) omega[c] = gauss(rng);
        double q = 0.0;
        do {
            q = chi2(rng);
        } while (!(q > 0.0));
        const double s = std::sqrt(2.0 * nu / q) / h;
        for (int c = 0; c < d; ++c) omega[c] *= s;
        return phase(rng);
    }
};

double rff_average(std::span<const double> x, std::span<const double> y, std::int64_t num_features,
                   const std::function<double(double*)>& draw) {
    const auto d = x.size();
    std::vector<double> omega(d);
    double sum = 0.0;
    for (std::int64_t i = 0; i < num_features; ++i) {
        const double b = draw(omega.data());
        double wx = 0.0;
        double wy = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            wx += omega[c] * x[c];
            wy += omega[c] * y[c];
        }
        sum += 2.0 * std::cos(wx + b) * std::cos(wy + b);
    }
    return sum / static_cast<double>(num_features);
}

}  // namespace

Eigen::MatrixXd sample_matern_frequencies(int d, double nu, double h, std::int64_t count, std::uint64_t seed) {
    if (d < 1 || count < 1) fail(ErrorKind::InvalidInput, "sample_matern_frequencies: bad arguments");
    KernelSpec::matern(nu, h).validate();
    std::mt19937_64 rng(seed);
    MaternFeatureSampler sampler(d, nu, h);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(count, d);
    for (std::int64_t i = 0; i < count; ++i) sampler.draw(rng, out.row(i).data());
    return out;
}

double rff_kernel_estimate(const KernelSpec& spec, std::span<const double> x, std::span<const double> y,
                           std::int64_t num_features, std::uint64_t seed) {
    spec.validate();
    require_rff_args(x, y, num_features);
    if (spec.family == KernelFamily::Gaussian) {
        fail(ErrorKind::Unsupported,
             "Matern random features need finite nu; use rff_gaussian_kernel_estimate for the Gaussian");
    }
    if (spec.family != KernelFamily::Matern) {
        fail(ErrorKind::Unsupported, "random Fourier features require a stationary kernel");
    }
    std::mt19937_64 rng(seed);
    MaternFeatureSampler sampler(static_cast<int>(x.size()), spec.nu, spec.h);
    return rff_average(x, y, num_features, [&](double* omega) { return sampler.draw(rng, omega); });
}

double rff_gaussian_kernel_estimate(double h, std::span<const double> x, std::span<const double> y,
                                    std::int64_t num_features, std::uint64_t seed) {
    KernelSpec::gaussian(h).validate();
    require_rff_args(x, y, num_features);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / h);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const auto d = x.size();
    return rff_average(x, y, num_features, [&](double* omega) {
        for (std::size_t c = 0; c < d; ++c) omega[c] = gauss(rng);
        return phase(rng);
    });
}

double rkhs_norm(const ImplicitField& field) {
    field.validate();
    const Eigen::Index m = field.centers.rows();
    Eigen::VectorXd row_sums(m);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            s += field.alpha[j] * eval_kernel(field.spec, row_span(field.centers, i), row_span(field.centers, j));
        }
        row_sums[i] = field.alpha[i] * s;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) total += row_sums[i];
    return total;
}

double BoundReport::bound_at(double h) const {
    return c1 * std::pow(h, -static_cast<double>(d)) + c2 * std::pow(h, 2.0 * nu);
}

double golden_section_log_min(const std::function<double(double)>& fn, double lo, double hi, double rel_tol) {
    if (!(lo > 0.0 && hi > lo)) fail(ErrorKind::InvalidInput, "golden_section_log_min: need 0 < lo < hi");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(lo);
    double b = std::log(hi);
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = fn(std::exp(c));
    double fe = fn(std::exp(e));
    for (int it = 0; it < 400 && (b - a) > rel_tol; ++it) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = fn(std::exp(c));
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = fn(std::exp(e));
        }
    }
    return std::exp(0.5 * (a + b));
}

ScalarGrid sample_unit_grid(int d, int n, const std::function<double(std::span<const double>)>& fn) {
    if (d < 1 || d > 2 || n < 2) fail(ErrorKind::InvalidInput, "sample_unit_grid: need d in {1,2} and n >= 2");
    ScalarGrid g;
    g.spec.resolution = {n, d == 2 ? n : 1, 1};
    g.spec.origin = Vec3::Zero();
    g.spec.spacing = 1.0 / n;
    g.values.resize(g.spec.node_count());
    double p[2];
    for (int j = 0; j < g.spec.resolution[1]; ++j) {
        for (int i = 0; i < n; ++i) {
            p[0] = static_cast<double>(i) / n;
            p[1] = static_cast<double>(j) / n;
            g.values[g.index(i, j, 0)] = fn({p, static_cast<std::size_t>(d)});
        }
    }
    return g;
}

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data;
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (!data) fail(ErrorKind::Capacity, "FFT buffer allocation failed");
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

double hann(int i, int n) {
    return 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1)));
}

}  // namespace

BoundReport norm_bound_report(const ScalarGrid& f, double nu, const std::vector<double>& h_values,
                              BoundOptions options) {
    const auto& res = f.spec.resolution;
    int d = 0;
    if (res[0] > 1) d = (res[1] > 1) ? ((res[2] > 1) ? 3 : 2) : 1;
    if (d == 0 || d == 3 || (d == 1 && res[2] > 1)) {
        fail(ErrorKind::InvalidInput, "norm_bound_report: samples must span 1 or 2 leading axes");
    }
    for (int a = 0; a < d; ++a) {
        const auto n = static_cast<unsigned>(res[static_cast<std::size_t>(a)]);
        if (n < 64 || !std::has_single_bit(n)) {
            std::ostringstream os;
            os << "norm_bound_report: axis " << a << " has " << n << " nodes; need a power of two >= 64";
            fail(ErrorKind::InvalidInput, os.str());
        }
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) fail(ErrorKind::InvalidInput, "norm_bound_report: nu must be finite and positive");
    if (!(f.spec.spacing > 0.0)) fail(ErrorKind::InvalidInput, "norm_bound_report: spacing must be positive");
    if (options.padding < 1) fail(ErrorKind::InvalidInput, "norm_bound_report: padding must be >= 1");
    if (f.values.size() != f.spec.node_count()) fail(ErrorKind::InvalidInput, "norm_bound_report: value count mismatch");
    for (double h : h_values) {
        if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidInput, "norm_bound_report: h values must be positive");
    }

    const int nx = res[0];
    const int ny = d == 2 ? res[1] : 1;
    double peak = 0.0;
    double edge = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double v = std::abs(f.at(i, j, 0));
            if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "norm_bound_report: non-finite sample");
            peak = std::max(peak, v);
            const bool boundary = i == 0 || i == nx - 1 || (d == 2 && (j == 0 || j == ny - 1));
            if (boundary) edge = std::max(edge, v);
        }
    }
    if (!(peak > 0.0)) fail(ErrorKind::InvalidInput, "norm_bound_report: function is identically zero");

    BoundReport r;
    r.d = d;
    r.nu = nu;
    r.windowed = edge > options.decay_tolerance * peak;

    const int px = nx * options.padding;
    const int py = d == 2 ? ny * options.padding : 1;
    const std::size_t total = static_cast<std::size_t>(px) * static_cast<std::size_t>(py);
    FftwBuffer buf(total);
    for (std::size_t t = 0; t < total; ++t) buf.data[t][0] = buf.data[t][1] = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double v = f.at(i, j, 0);
            if (r.windowed) v *= hann(i, nx) * (d == 2 ? hann(j, ny) : 1.0);
            buf.data[static_cast<std::size_t>(j) * static_cast<std::size_t>(px) + static_cast<std::size_t>(i)][0] = v;
        }
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = d == 1 ? fftw_plan_dft_1d(px, buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE)
                      : fftw_plan_dft_2d(py, px, buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    // Continuous transform ~ dx^d * DFT; Riemann sums over the natural lattice.
    const double dx = f.spec.spacing;
    const double amp = std::pow(dx, d);
    const double dwx = 1.0 / (px * dx);
    const double dwy = 1.0 / (py * dx);
    const double cell = d == 2 ? dwx * dwy : dwx;
    const double p_exp = nu + 0.5 * d;

    std::vector<double> radial2(total);
    std::vector<double> weight(total);
    double c_prime = 0.0;
    double c_prime_dnu = 0.0;
    for (int j = 0; j < py; ++j) {
        const int kj = j < py / 2 || py == 1 ? j : j - py;
        const double wy = d == 2 ? kj * dwy : 0.0;
        for (int i = 0; i < px; ++i) {
            const int ki = i < px / 2 ? i : i - px;
            const double wxv = ki * dwx;
            const std::size_t t = static_cast<std::size_t>(j) * static_cast<std::size_t>(px) + static_cast<std::size_t>(i);
            const double re = amp * buf.data[t][0];
            const double im = amp * buf.data[t][1];
            const double w = (re * re + im * im) * cell;
            const double r2 = kTwoPi * kTwoPi * (wxv * wxv + wy * wy);
            radial2[t] = r2;
            weight[t] = w;
            c_prime += w;
            c_prime_dnu += std::pow(r2, p_exp) * w;
        }
    }

    const double norm_const = std::pow(kTwoPi, 0.5 * d) * matern_spectral_constant(d, nu);
    r.c_prime = c_prime;
    r.c_prime_dnu = c_prime_dnu;
    r.c1 = std::pow(2.0 * nu, p_exp) * c_prime / norm_const;
    r.c2 = c_prime_dnu / norm_const;
    if (!(r.c2 > 0.0)) fail(ErrorKind::Numeric, "norm_bound_report: high-frequency content vanished");

    r.h_star_closed = std::pow(static_cast<double>(d) / (2.0 * nu) * r.c1 / r.c2, 1.0 / (2.0 * nu + d));
    r.h_star_numeric = golden_section_log_min([&r](double h) { return r.bound_at(h); }, 1e-3, 1e3);

    for (double h : h_values) {
        double s = 0.0;
        const double a = 2.0 * nu / (h * h);
        for (std::size_t t = 0; t < total; ++t) s += std::pow(a + radial2[t], p_exp) * weight[t];
        const double norm = std::pow(h, 2.0 * nu) * s / norm_const;
        const double bound = r.bound_at(h);
        r.norm_values.emplace_back(h, norm);
        r.bound_values.emplace_back(h, bound);
        if (bound < norm * (1.0 - 1e-12)) r.bound_holds = false;
    }
    return r;
}

}  // namespace matern
