#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "matern/types.hpp"

namespace matern {

enum class KernelFamily { Matern, Gaussian, ArcCosine };

/// Compactly supported multiplier max{0, (1 - tau/h')^nu'} used to sparsify Gram matrices.
struct Taper {
    double nu_prime = 2.0;
    double h_prime = 4.0;
};

/// Kernel selection. Matern smoothness is restricted to the half-integers
/// 1/2, 3/2 and 5/2, which have exponential-times-polynomial closed forms;
/// the Gaussian is the nu -> infinity member of the family.
struct KernelSpec {
    KernelFamily family = KernelFamily::Matern;
    double nu = 1.5;
    double h = 1.0;
    std::optional<Taper> taper;

    static KernelSpec matern(double nu, double h);
    static KernelSpec gaussian(double h);
    static KernelSpec arc_cosine();

    /// Adds a taper. h_prime <= 0 selects the default cutoff 4h.
    KernelSpec with_taper(double h_prime = 0.0, double nu_prime = 2.0) const;

    /// Throws InvalidInput when the invariants of the family are violated.
    void validate() const;

    bool is_stationary() const { return family != KernelFamily::ArcCosine; }
    /// Analytic gradients exist for Matern nu >= 3/2 and the Gaussian.
    bool has_analytic_gradient() const;

    /// Flat key: matern12, matern32, matern52, gaussian or arccos.
    std::string key() const;
    static KernelSpec from_key(std::string_view key, double h = 1.0);
};

double eval_matern(const KernelSpec& spec, double tau);
double eval_gaussian(double h, double tau);
/// First-order arc-cosine kernel. Returns 0 when either argument is the zero vector.
double eval_arc_cosine(std::span<const double> x, std::span<const double> y);
double eval_taper(double nu_prime, double h_prime, double tau);

/// Radial profile Phi(tau) of a stationary spec, including the taper factor.
double radial_profile(const KernelSpec& spec, double tau);

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Gradient of k(x, y) with respect to x. Zero at x == y.
/// Throws UnsupportedGradient for Matern 1/2 and the arc-cosine kernel.
Eigen::VectorXd kernel_gradient(const KernelSpec& spec, std::span<const double> x,
                                std::span<const double> y);

/// Phi'(tau) / tau for stationary specs with analytic gradients; finite at tau = 0.
double radial_derivative_over_tau(const KernelSpec& spec, double tau);

struct SpectralParams {
    int d = 1;
    double nu = 0.5;
    double h = 1.0;
    double c_dnu = 0.0;

    /// Fills c_dnu = 2^d pi^{d/2} Gamma(nu + d/2) (2 nu)^nu / Gamma(nu).
    static SpectralParams make(int d, double nu, double h);
};

double matern_spectral_constant(int d, double nu);

/// Spectral density of the Matern kernel in the ordinary-frequency convention,
/// Phi(tau) = integral p(omega) exp(2 pi i omega . tau) d omega.
double spectral_density(const SpectralParams& params, std::span<const double> omega);
/// Gaussian counterpart, (2 pi)^{d/2} h^d exp(-2 pi^2 h^2 |omega|^2).
double gaussian_spectral_density(int d, double h, std::span<const double> omega);

/// K(i, j) = k(X_i, Y_j).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointMatrix& x, const PointMatrix& y);
/// Symmetric Gram matrix of a single point set; exact symmetry by mirroring.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointMatrix& x);

}  // namespace matern
