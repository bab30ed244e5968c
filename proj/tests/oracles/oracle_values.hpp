// Generated by compute_oracles.py; do not edit.
#pragma once

namespace oracle {

// median of the positive 1/2-stable law, Laplace exp(-sqrt(lambda))
inline constexpr double levy_median = 1.0990546691588663;

// exp(-2^0.9)
inline constexpr double exp_neg_two_pow_0_9 = 0.15473118112156395;

// exp(-2^0.7)
inline constexpr double exp_neg_two_pow_0_7 = 0.19700921144909112;

// int_0^inf (1 - cos u) u^-2 du
inline constexpr double half_pi_by_quadrature = 1.5707963267949512;

// int_{2^-12}^inf e^{-x} dx
inline constexpr double gamma_mean_k12 = 0.9997558891748972;

// int_0^1 t^{2H-2} dt at H = 0.75
inline constexpr double fbm_unit_square_bound = 2.0;

// fBm H = 0.75: C(2,2)
inline constexpr double fbm_cov_22 = 2.8284271247461903;

// E exp(-0.5 sum Gamma_i^-2) by quadrature
inline constexpr double lepage_half_laplace_0_5 = 0.2855568522987236;

// exp(-Gamma(1/2) sqrt(lambda))
inline constexpr double lepage_half_laplace_closed_0_5 = 0.28555685229871414;

// exp(-pi lambda / 2)
inline constexpr double cauchy_cf_0_5 = 0.45593812776599624;

// Re Psi(0.5), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_re_0_5 = 0.17613314258777868;

// Im Psi(0.5), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_im_0_5 = -0.45008051550407563;

// E exp(-1.0 sum Gamma_i^-2) by quadrature
inline constexpr double lepage_half_laplace_1_0 = 0.16991552946751967;

// exp(-Gamma(1/2) sqrt(lambda))
inline constexpr double lepage_half_laplace_closed_1_0 = 0.16991552946752622;

// exp(-pi lambda / 2)
inline constexpr double cauchy_cf_1_0 = 0.20787957635076193;

// Re Psi(1.0), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_re_1_0 = 0.5838855562027156;

// Im Psi(1.0), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_im_1_0 = -0.6480598491103686;

// E exp(-2.0 sum Gamma_i^-2) by quadrature
inline constexpr double lepage_half_laplace_2_0 = 0.08154271589474596;

// exp(-Gamma(1/2) sqrt(lambda))
inline constexpr double lepage_half_laplace_closed_2_0 = 0.08154271589474965;

// exp(-pi lambda / 2)
inline constexpr double cauchy_cf_2_0 = 0.04321391826377226;

// Re Psi(2.0), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_re_2_0 = 1.121484323489474;

// Im Psi(2.0), eta uniform on {1,2}
inline constexpr double jump_at_eta_psi_im_2_0 = -0.2654480895858588;

// compound Poisson with Levy measure 0.6 delta_1 + 0.4 delta_2 at t = 1, k = 0..10
inline constexpr double compound_pmf_06_04[11] = {0.36787944117144233, 0.2207276647028654, 0.21337007587943657, 0.10153472576331808, 0.057904224040385026, 0.023194063006977097, 0.010039969506082382, 0.0035113188727473013, 0.0012673458660642858, 0.00039660695753737917, 0.0001251840867373856};

// Poisson(1) pmf, k = 0..10
inline constexpr double poisson1_pmf[11] = {0.36787944117144233, 0.36787944117144233, 0.18393972058572114, 0.06131324019524039, 0.015328310048810101, 0.00306566200976202, 0.0005109436682936698, 7.299195261338139e-05, 9.123994076672672e-06, 1.013777119630298e-06, 1.0137771196302985e-07};

// erfc^{-1}(1/2)
inline constexpr double erfcinv_half = 0.4769362762044699;

}  // namespace oracle
