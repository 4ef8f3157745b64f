#pragma once

// The UBBS1 law: density, distribution function, quantile, moments,
// stress-strength probability and modality.

#include <span>
#include <vector>

#include "ubbs1/params.hpp"

namespace ubbs1 {

/// s = 1/z - 1 and the two quadratic forms of the Bessel argument.
struct UvIntermediates {
    double s = 0.0;
    double log_s = 0.0;
    double u_rho = 0.0;
    double v_rho = 0.0;
};

UvIntermediates uv_intermediates(double z, const Ubbs1Params& p);

double log_pdf(double z, const Ubbs1Params& p);
double pdf(double z, const Ubbs1Params& p);

/// Closed form of the independent case (rho must be 0), evaluated directly
/// with unscaled Bessel functions. Overflows for small alphas; reference only.
double pdf_independent(double z, const Ubbs1Params& p);

/// Density of S = X / Y for independent X, Y (rho must be 0).
double type2_ratio_pdf(double s, const Ubbs1Params& p);

struct CdfOptions {
    int order = 64;         ///< Gauss-Hermite order for the normal-weighted integral
    bool validate = true;   ///< cross-check against twice the order, fall back to adaptive on mismatch
    double agreement = 1e-9;
};

/// F(z) and 1 - F(z), each computed directly so neither tail loses precision.
struct TailProbabilities {
    double lower = 0.0;
    double upper = 0.0;
};

TailProbabilities cdf_tails(double z, const Ubbs1Params& p, const CdfOptions& opts = {});
double cdf(double z, const Ubbs1Params& p, const CdfOptions& opts = {});
double survival(double z, const Ubbs1Params& p, const CdfOptions& opts = {});

/// cdf_tails over many points sharing one parameter vector.
std::vector<TailProbabilities> cdf_tails(std::span<const double> z, const Ubbs1Params& p,
                                         const CdfOptions& opts = {});

double quantile(double q, const Ubbs1Params& p, const CdfOptions& opts = {});

/// Raw moment E[Z^n] = n * int_0^1 z^{n-1} (1 - F(z)) dz.
double moment(int n, const Ubbs1Params& p, const CdfOptions& opts = {});

/// Truncated power series 1 + sum_{n=1}^{terms} mu_n t^n / n!.
double mgf(double t, const Ubbs1Params& p, int terms = 30, const CdfOptions& opts = {});

/// R = P(X < Y), evaluated from the normal-weighted erf integral at s = 1.
double stress_strength(const Ubbs1Params& p, const CdfOptions& opts = {});

enum class ModalityKind { unimodal, bimodal };
enum class CriticalKind { max, min };

struct CriticalPoint {
    double z = 0.0;
    CriticalKind kind = CriticalKind::max;
};

struct ModalityReport {
    ModalityKind kind = ModalityKind::unimodal;
    std::vector<CriticalPoint> critical_points;

    std::vector<double> modes() const;
};

ModalityReport classify_modality(const Ubbs1Params& p, int grid_size = 2001);

namespace detail {
/// Per-observation log-likelihood term: log_pdf(z) - log((s+1)^2 / s).
double log_kernel(double s, double log_s, const Ubbs1Params& p);
}  // namespace detail

}  // namespace ubbs1
