#pragma once

// Scalar functionals of the state and the damping operators of the
// fluctuation-dissipation equations.

#include "nlsball/radial_spectral.hpp"

#include <optional>
#include <string_view>

namespace nlsball {

enum class DissipationVariant {
    /// exp(rho(|u|_{H^{beta-delta}})) [ (-Delta)^{beta-1} u + P_N |u|^{2q} u ], beta in [1, 3/2]
    Subcritical,
    /// (1-Delta)^{beta-1} u + 2 exp(2 |P_N |u|^{2q} u|^2) P_N |u|^{2q} u + P_N exp(|u|^2) u,
    /// beta in (1, 3/2 - 1/q]
    Supercritical,
};

/// Concave gauge xi; the damping weight uses rho = 3 xi^{-1}.
enum class Gauge { Sqrt, Log1p, Linear };

std::string_view to_string(DissipationVariant v);
std::string_view to_string(Gauge g);
DissipationVariant parse_variant(std::string_view s);
Gauge parse_gauge(std::string_view s);

double gauge_value(Gauge xi, double x);
double gauge_inverse(Gauge xi, double y);

/// Scaling-critical regularity 3/2 - 1/q.
double critical_regularity(double q);

struct DissipationSpec {
    DissipationVariant variant = DissipationVariant::Subcritical;
    double q = 3.0;
    double beta = 1.2;
    Gauge xi = Gauge::Sqrt;
    /// H^{beta-} is taken as H^{beta - delta}.
    double delta = 0.01;

    /// Test hooks: a fixed value of rho replaces rho(|u|), and a weight on the
    /// nonlinear damping terms (0 switches them off).
    std::optional<double> frozen_rho;
    double nonlinear_weight = 1.0;

    double rho(double x) const { return 3.0 * gauge_inverse(xi, x); }

    /// Throws ValidationError naming the violated constraint.
    void validate() const;
};

/// Smooth bump equal to 1 on [0, R] and 0 on [2R, inf).
struct CutoffSpec {
    double R = 1.0;
};

double cutoff(double x, const CutoffSpec& spec);

/// Sum |c_n|^2.
double mass(const SpectralField& u);

/// 1/2 sum z_n^2 |c_n|^2 + |u|_{L^{2q+2}}^{2q+2} / (2q+2).
double energy(const SpectralField& u, double q, const RadialGrid& grid);

/// Pointwise |u|^{2q} u; |u| = 0 maps to 0 for every q > 0.
PhysicalField power_nonlinearity(const PhysicalField& u, double q);

/// P_N |u|^{2q} u as a field of the same dimension as u.
SpectralField projected_nonlinearity(const SpectralField& u, double q, const RadialGrid& grid);

/// The damping operator L(u). Throws DivergenceError on exponential overflow.
SpectralField dissipation_operator(const SpectralField& u, const DissipationSpec& spec,
                                   const RadialGrid& grid);

/// The mass dissipation rate, <u, L(u)>, assembled from its closed form.
double mass_dissipation_rate(const SpectralField& u, const DissipationSpec& spec,
                             const RadialGrid& grid);

/// The energy dissipation rate E'(u; L(u)), assembled term by term.
double energy_dissipation_rate(const SpectralField& u, const DissipationSpec& spec,
                               const RadialGrid& grid);

/// Pointwise lower bound for the energy dissipation rate derived by
/// absorbing the cross terms (see tests).
double energy_dissipation_floor(const SpectralField& u, const DissipationSpec& spec,
                                const RadialGrid& grid);

/// <|grad u|^2, |u|^{2p}> by quadrature.
double gradient_weighted_moment(const SpectralField& u, double p, const RadialGrid& grid);

/// Int |grad u|^2 r^2 dr by quadrature, including the boundary node.
double dirichlet_energy_quadrature(const SpectralField& u, const RadialGrid& grid);

/// Truncated exponential series sum_{p=0}^{P} |u|_{L^{2p+2}}^{2p+2} / p!.
double exponential_series_partial(const PhysicalField& u, const RadialGrid& grid, int terms);

/// Int |u|^2 exp(|u|^2) r^2 dr. Throws DivergenceError if |u|^2 > 700 at a node.
double exponential_moment(const PhysicalField& u, const RadialGrid& grid);

/// Largest |u|^2 allowed inside an exponential before a trajectory is declared divergent.
inline constexpr double exponent_ceiling = 700.0;

} // namespace nlsball
