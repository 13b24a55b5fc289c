#pragma once

// Exact KPZ algebra: maps between quantum-gravity and planar conformal
// weights, their duals, Kac weights and the fusion rules for
// mutually-avoiding random sets.  Everything here is a pure function of its
// arguments; binary64 throughout.

#include <optional>
#include <span>

namespace kpz {

enum class Phase { Dilute, Dense };
enum class Frame { QuantumGravity, Planar };
enum class Locus { Bulk, Boundary };
enum class Branch { Negative, Positive };

const char* to_string(Phase p);
const char* to_string(Frame f);
const char* to_string(Locus l);

/// One universality class, every parametrization filled in and mutually
/// consistent.  Build it with models::model_point().
struct ModelPoint {
    double c = 0.0;           // central charge, <= 1
    double gamma = 0.0;       // string susceptibility, <= 0
    double gamma_dual = 0.0;  // dual root, >= 0
    double g = 1.0;           // Coulomb-gas coupling
    double kappa = 4.0;       // SLE parameter
    Phase phase = Phase::Dilute;
    std::optional<double> n_loop;   // O(N) fugacity
    std::optional<double> q_potts;  // Potts Q
};

/// A conformal weight tagged by where it lives.  `dual` is the dual weight
/// (Delta - gamma)/(1 - gamma) when it has been computed.
struct Weight {
    double value = 0.0;
    Frame frame = Frame::Planar;
    Locus locus = Locus::Bulk;
    std::optional<double> dual;
};

/// Kac indices; half-integers such as (L/2, 0) are allowed.
struct KacIndex {
    double p = 1.0;
    double q = 1.0;
};

/// Boundary weight of the empty star and the boundary/area exponent nu.
struct PhaseData {
    double delta0_boundary = 0.0;
    double nu = 1.0;
};

struct DualWeight {
    double gamma_dual;
    double delta_dual;
};

// --- central charge and susceptibility ---------------------------------

double c_of_gamma(double gamma);
double gamma_of_c(double c, Branch branch);

// --- KPZ maps in the gamma parametrization ------------------------------

/// U_gamma(Delta) = Delta (Delta - gamma) / (1 - gamma).
double kpz_map(double gamma, double delta);

/// Positive inverse of U_gamma.  Throws DomainError on a negative radicand.
double kpz_inverse(double gamma, double x);

/// V_gamma(x) = (x^2 - gamma^2) / (4 (1 - gamma)) = U_gamma((x + gamma)/2).
double v_map(double gamma, double x);

/// V_gamma^{-1}(x) = sqrt(4 (1 - gamma) x + gamma^2).
double v_inverse(double gamma, double x);

/// Planar bulk scaling dimension x = 2 V_gamma(boundary QG weight).
double bulk_from_boundary_qg(double gamma, double delta_boundary);

DualWeight dual_weight(double gamma, double delta);

/// h_{p,q} = ([(1-gamma) p - q]^2 - gamma^2) / (4 (1 - gamma)).
double kac_weight(double gamma, KacIndex idx);

PhaseData phase_data(double gamma, Phase phase);

// --- the same maps in the SLE parametrization ---------------------------
// U_kappa coincides with U_gamma at gamma = 1 - 4/kappa for every kappa, so
// for kappa >= 4 it acts on dual weights.

double sle_kpz(double kappa, double delta);
double sle_kpz_inverse(double kappa, double x);

/// V_kappa(Delta) = (kappa^2 Delta^2 - (kappa - 4)^2) / (16 kappa).
double sle_v(double kappa, double delta);

/// Planar bulk scaling dimension 2 V_kappa(Delta).
double sle_bulk(double kappa, double delta);

/// hbar^kappa_{p,q} = ((4p - kappa q)^2 - (kappa - 4)^2) / (16 kappa).
double sle_kac_weight(double kappa, KacIndex idx);

/// Delta^kappa_{p,q} = U_kappa^{-1}(hbar^kappa_{p,q}) = (|4p - kappa q| + kappa - 4) / (2 kappa).
double sle_kac_qg_weight(double kappa, KacIndex idx);

// --- fusion of mutually-avoiding sets -----------------------------------

/// Boundary dimension of A1 ^ A2 ^ ... from the boundary dimensions of the
/// parts: U_kappa of the summed U_kappa^{-1} images.
double fuse_boundary(double kappa, std::span<const double> boundary_dims);

/// Bulk dimension of the same star: 2 V_kappa of the summed images.
double fuse_bulk(double kappa, std::span<const double> boundary_dims);

/// Short-distance exponent of two mutually-avoiding sets with boundary
/// dimensions xa, xb approaching each other on the boundary or in the bulk.
double sde_exponent(double kappa, double xa, double xb, Locus locus);

}  // namespace kpz
