#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "matern/field.hpp"
#include "matern/kernel.hpp"
#include "matern/krr.hpp"

namespace matern {

/// (|omega|, p(omega)) rows along the first frequency axis, |omega| from 0 to omega_max.
std::vector<std::pair<double, double>> spectrum_table(const SpectralParams& params, double omega_max,
                                                      int steps);
/// Same for any stationary spec (Gaussian included); the taper is ignored.
std::vector<std::pair<double, double>> spectrum_table(const KernelSpec& spec, int d, double omega_max,
                                                      int steps);

/// 1-based inclusive eigenvalue index range. Zeros select the default [n/10, n/2].
struct IndexWindow {
    int first = 0;
    int last = 0;
};

struct EdrFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    IndexWindow eigenvalues_used;
    /// All eigenvalues of K/n, descending.
    Eigen::VectorXd eigenvalues;
};

/// Least-squares fit of log(lambda_s) against log(s) over the window.
EdrFit fit_decay(const Eigen::VectorXd& eigenvalues_desc, IndexWindow window = {});

/// Eigenvalue decay of K/n on n uniform points in [0,1]^d.
EdrFit empirical_edr(const KernelSpec& spec, int n, int d, std::uint64_t seed,
                     IndexWindow window = {});

/// Random-feature estimate of a Matern kernel: frequencies drawn from its
/// spectral density (a scaled multivariate Student-t with 2 nu degrees of
/// freedom) and uniform phases. Throws Unsupported for the Gaussian.
double rff_kernel_estimate(const KernelSpec& spec, std::span<const double> x, std::span<const double> y,
                           std::int64_t num_features, std::uint64_t seed);
/// Gaussian kernel counterpart with normal frequencies.
double rff_gaussian_kernel_estimate(double h, std::span<const double> x, std::span<const double> y,
                                    std::int64_t num_features, std::uint64_t seed);

/// Angular frequency draws omega = 2 pi w for a Matern density in d dimensions,
/// one per row, in the order rff_kernel_estimate consumes them.
Eigen::MatrixXd sample_matern_frequencies(int d, double nu, double h, std::int64_t count,
                                          std::uint64_t seed);

/// alpha^T K alpha with K rebuilt from the field's centers.
double rkhs_norm(const ImplicitField& field);

struct BoundOptions {
    /// Zero-padding factor per axis (1 = none).
    int padding = 1;
    /// Boundary-to-peak magnitude ratio above which a Hann window is applied.
    double decay_tolerance = 1e-3;
};

struct BoundReport {
    int d = 1;
    double nu = 0.5;
    double c_prime = 0.0;
    double c_prime_dnu = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double h_star_closed = 0.0;
    double h_star_numeric = 0.0;
    std::vector<std::pair<double, double>> bound_values;
    std::vector<std::pair<double, double>> norm_values;
    bool windowed = false;
    /// bound >= norm at every h, up to a 1e-12 relative slack.
    bool bound_holds = true;

    double bound_at(double h) const;
};

/// Spectral RKHS norm and its two-term upper bound for samples of f on [0,1]^d
/// (d = number of axes with more than one node, 1 or 2). Active axes must be
/// leading and hold a power of two >= 64 nodes.
BoundReport norm_bound_report(const ScalarGrid& f_samples, double nu, const std::vector<double>& h_values,
                              BoundOptions options = {});

/// Samples fn on the n^d nodes i/n of [0,1)^d.
ScalarGrid sample_unit_grid(int d, int n, const std::function<double(std::span<const double>)>& fn);

/// Golden-section minimization of fn over log h in [lo, hi].
double golden_section_log_min(const std::function<double(double)>& fn, double lo, double hi,
                              double rel_tol = 1e-12);

}  // namespace matern
