#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "lagflow/field.hpp"
#include "lagflow/sym_matrix.hpp"

// Explicit constructions in R^{2n} = R^n (+) J R^n. Used as runtime diagnostics
// and as independent checks of the closed forms in lagflow::spectrum.
namespace lagflow::geometry {

using Matrix = Eigen::MatrixXd;

// Block matrices of the standard splitting: pi1 = [[I,0],[0,0]],
// pi2 = [[0,0],[0,I]], J = [[0,-I],[I,0]].
Matrix base_projection(int n);
Matrix fiber_projection(int n);
Matrix complex_structure(int n);

// Orthonormal tangent frame e_i = (a_i, lambda_i a_i) / sqrt(1 + lambda_i^2) of
// the graph of the gradient, with a_i the Hessian eigenvectors.
struct AdaptedFrame {
  int n = 0;
  Matrix a;  // n x n, columns a_i
  EigenTuple lambdas;
  Matrix e;  // 2n x n, columns e_i
};

AdaptedFrame make_frame(const SymMatrix& hessian);
// Throws InvalidFrame if a is not n x n orthonormal or lambdas has the wrong size.
AdaptedFrame make_frame(const Matrix& a, std::span<const double> lambdas);

// max |<e_i, e_j> - delta_ij|.
double orthonormality_defect(const AdaptedFrame& frame);
// max |omega(e_i, e_j)| with omega(X, Y) = <J X, Y>.
double lagrangian_defect(const AdaptedFrame& frame);

// S(e_i, e_j) = <J pi1 e_i, pi2 e_j>. Throws InvalidFrame if the frame is not
// orthonormal and Lagrangian to 1e-12.
Matrix s_from_first_principles(const AdaptedFrame& frame);
// P(e_i, e_j) = <pi1 e_i, pi1 e_j> - <pi2 e_i, pi2 e_j>.
Matrix p_from_first_principles(const AdaptedFrame& frame);

// Induced endomorphism on 2-vectors, pairs (i<j) in lexicographic order:
// T_(ij)(kl) = T_ik d_jl + T_jl d_ik - T_il d_jk - T_jk d_il.
// Throws UndefinedForDimension for n < 2.
Matrix s2_matrix(const Matrix& tensor);

// log det via LU; -inf when det <= 0.
double log_det(const Matrix& m);

struct SecondFundamental {
  SymTensor3 h;       // coordinate components u_ijk
  SymMatrix g;        // I + (D^2 u)^2
  SymMatrix g_inv;
  double normA2 = 0.0;           // g^ip g^jq g^kr u_ijk u_pqr
  EigenTuple mean_curvature;     // H_k = g^ij u_ijk
  double mean_curvature_norm2 = 0.0;  // g^kl H_k H_l
};

// g^{-1} = (I + H^2)^{-1}.
SymMatrix inverse_metric(const SymMatrix& hessian);

SecondFundamental second_fundamental(const SymMatrix& hessian, const SymTensor3& third);

struct ImmersionCheck {
  double normA2 = 0.0;
  // max deviation of h(e_a, e_b, J e_c) from total symmetry, orthonormal frame.
  double symmetry_defect = 0.0;
};

// |A|^2 from the immersion F(x) = (x, grad u(x)) alone: centered differences of F,
// Gram-Schmidt tangent frame, projection of the second derivatives onto J e_c.
// Shares no stencil with third_derivs.
// Same construction from an exact jet: d_i F = (e_i, D^2u e_i), d_i d_j F = (0, u_ij.).
ImmersionCheck immersion_from_jet(const SymMatrix& hessian, const SymTensor3& third);

ImmersionCheck immersion_oracle_a2(const PotentialField& field, std::size_t p);

// max_k |d_k theta (centered difference of the angle) - g^ij u_ijk| at p.
double theta_gradient_vs_meancurv(const PotentialField& field, std::size_t p);

}  // namespace lagflow::geometry
