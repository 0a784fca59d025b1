#pragma once

namespace qls {

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

/// Member of the explicit family solving -Delta v = m v^{(N+2)/(N-2)} on R^N.
///
/// The amplitude prefactor is (N(N-2)/m)^{(N-2)/4}; it is the only constant for
/// which the residual of the critical equation vanishes when m != 1 (the two
/// groupings (N(N-2)m)^{(N-2)/4} and [N(N-2) sqrt(m)]^{(N-2)/2} coincide with
/// it only at m = 1 and N(N-2) = 1 respectively). talenti_residual checks this.
struct TalentiBubble {
  int N = 5;
  double m = 1.0;
  double mu = 1.0;

  void validate() const;
  double prefactor() const;
  double peak() const;
};

double talenti_eval(const TalentiBubble& b, double r);
double talenti_derivative(const TalentiBubble& b, double r);
/// Analytic radial Laplacian v'' + (N-1)/r v' (finite at r = 0).
double talenti_laplacian(const TalentiBubble& b, double r);
/// Delta v + m v^{(N+2)/(N-2)}.
double talenti_residual(const TalentiBubble& b, double r);
/// mu recovered from a peak value (inverse of peak()).
double talenti_mu_from_peak(int N, double m, double peak);

/// Fundamental solution of -Delta, A(r) = 1/((N-2)|S^{N-1}| r^{N-2}).
struct FundamentalSolution {
  int N = 5;
  double operator()(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
};

/// L_m(U_t) = (t^{N-2}/2 - t^N (N-2)/(2N)) * grad_norm_sq along U_t = U(./t).
double dilation_energy(double grad_norm_sq, int N, double t);

/// Smallest t0 > 1 with dilation_energy(q, N, t) < level for all t >= t0.
double dilation_threshold(double grad_norm_sq, int N, double level = -2.0);

}  // namespace qls
