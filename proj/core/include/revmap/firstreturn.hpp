// SPDX-License-Identifier: Apache-2.0
//
// Rescaled first-return maps T_km near a symmetric heteroclinic tangency.
//
// In rescaled coordinates T_km is the L-symmetric implicit pair
//
//   M + c ybar + d xbar^2 + f11 l1^k xbar ybar + f03 l1^k xbar^3
//       = b l2^m l1^-k y + a l2^m x + l02 l2^m y^2 + rem
//
// together with its image under (x, y, xbar, ybar) -> (ybar, xbar, y, x).
#pragma once

#include "revmap/core.hpp"
#include "revmap/hmap.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace revmap {

struct GlobalMapCoeffs {
    double a = 1.0, b = 1.0, c = -1.0, d = 1.0;
    double f11 = 0.3, f03 = 0.1, l02 = 0.2;
    double alpha1 = 1.0, alpha2 = 1.0;
    double lambda1 = 0.6, lambda2 = 0.6;

    double Q() const { return 2.0 * a * d - b * f11 - 2.0 * c * l02; }
    void validate() const; // throws DomainError
};

struct ReturnInstance {
    GlobalMapCoeffs coeffs;
    int k = 8, m = 8;
    double M = 0.0;
    std::optional<std::uint64_t> remainder_seed;
    double theta = 4.0; // allowed ratio between l1^k and l2^m
    bool lambda_terms = true; // the f11, f03, a, l02 corrections
};

// m with l2^m closest to l1^k
int balanced_m(const GlobalMapCoeffs& g, int k);

double beta_km(const ReturnInstance& inst);
// x = scale * X maps H coordinates X to rescaled coordinates x
inline double h_scale(const ReturnInstance& inst) { return -beta_km(inst) / inst.coeffs.d; }

void check_balance(const ReturnInstance& inst); // throws BalanceViolation

// left side minus right side of the first equation, with its gradient
struct TkmEquation {
    double M, c, d, f11K, f03K, Bp, aL, l02L;
    double eps = 0.0; // remainder magnitude
    std::vector<std::array<double, 6>> terms; // amp, w1..w4, phase
    double operator()(double x, double y, double xb, double yb) const;
    std::array<double, 4> grad(double x, double y, double xb, double yb) const;
};

TkmEquation tkm_equation(const ReturnInstance& inst);

PlanarMap build_Tkm(const ReturnInstance& inst);
// Jacobian of T_km at p given its image, from the analytic partials
Mat2 tkm_jacobian(const TkmEquation& g, const Point2& p, const Point2& image);

HParams to_HParams(const ReturnInstance& inst);
double M_of_Mtilde(const ReturnInstance& inst, double M_tilde);

double mu_of_M(const ReturnInstance& inst);
double M_of_mu(const ReturnInstance& inst, double mu);
double mu_fold_formula(const GlobalMapCoeffs& g, int k, int m);
double mu_pf_formula(const GlobalMapCoeffs& g, int k, int m);

struct TkmFixedPoint {
    Point2 z;
    Mat2 J;
    bool symmetric = false;
    FixedKind kind = FixedKind::Saddle;
};

// symmetric fixed points within |X| <= window in H coordinates, sorted by X descending
std::vector<TkmFixedPoint> tkm_symmetric_points(const ReturnInstance& inst, double window = 20.0);

struct AsymmetricPair {
    Point2 plus, minus;   // plus has the larger X in H coordinates
    double J_plus = 0.0, J_minus = 0.0;
    double prediction = 0.0;         // 1 + Q (xi - eta) l1^k / (b c) at plus
    double printed_prediction = 0.0; // 1 + Q (eta - xi) l1^k / (b c) at plus
    FixedKind kind_plus = FixedKind::Saddle, kind_minus = FixedKind::Saddle;
};

// throws NoAsymmetricPair
AsymmetricPair asymmetric_jacobians(const ReturnInstance& inst);

enum class TangencyType { Inner, Outer };
std::string to_string(TangencyType t);

struct CascadeRow {
    int k = 0, m = 0;
    bool ok = false;
    std::string failure;
    TangencyType type = TangencyType::Inner;
    double c_tilde = 0.0;
    double M_fold = 0.0, M_pf = 0.0;
    double mu_fold = 0.0, mu_fold_formula = 0.0;
    double mu_pf = 0.0, mu_pf_formula = 0.0;
    std::optional<double> mu_pd;
    double fold_trace = 0.0; // symmetric trace at the detected fold
    double J_plus = 0.0, J_minus = 0.0;
    std::string kind_plus, kind_minus;
};

struct CascadeReport {
    GlobalMapCoeffs coeffs;
    std::vector<CascadeRow> rows; // ordered as k_list
};

struct CascadeOptions {
    double sweep_step = 0.02;  // in M tilde
    double M_tol = 1e-10;      // bisection tolerance in M
    double pair_offset = 0.5;  // M tilde above the pitchfork where the pair is sampled
    double M_window = 1.0;     // sweep margin in M tilde around the predictions
    int threads = 1;
};

using MRule = std::function<int(const GlobalMapCoeffs&, int)>;

CascadeReport cascade_scan(const GlobalMapCoeffs& coeffs, const std::vector<int>& k_list,
                           const MRule& m_rule = balanced_m, const CascadeOptions& opt = {});

} // namespace revmap
