#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qvdp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Physical rates of the driven cavity plus the Fock truncation.
///
/// H = -delta a^dag a + eps a^dag + conj(eps) a, with dissipators
/// kappa D[a] (loss), gain D[a^dag] (linear gain) and eta D[a^2]
/// (two-photon loss).
struct SystemParams {
  double delta = 10.0;
  double kappa = 0.1;
  double gain = 1.0;
  double eta = 0.05;
  cplx eps{0.0, 0.0};
  int dim = 2;

  /// Throws Errc::invalid_parameter / Errc::invalid_dimension.
  void validate() const;

  /// |eps| * sqrt(eta); the drive axis used throughout.
  double eps_scaled() const;

  /// Real drive eps = eps_scaled / sqrt(eta). Requires eta > 0.
  void set_eps_scaled(double eps_scaled);

  std::string describe() const;
};

/// Photon-number scale estimate used for the default truncation:
/// max of the limit-cycle radius^2 (g-kappa)/(2 eta), the classical fixed
/// point |alpha*|^2 and the linear thermal occupation g/(kappa-g).
double estimated_occupation(const SystemParams& p);

/// ceil(3 n_est + 20).
int default_dimension(const SystemParams& p);

struct Operator {
  CMatrix m;
  int dim() const { return static_cast<int>(m.rows()); }
};

struct DensityMatrix {
  CMatrix m;
  int dim() const { return static_cast<int>(m.rows()); }
};

Operator annihilation(int dim);
Operator creation(int dim);
Operator number(int dim);
Operator a_squared(int dim);
Operator hamiltonian(const SystemParams& p);

/// Truncated coherent amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!),
/// n < dim, without renormalization.
CVector coherent_amplitudes(cplx alpha, int dim);

/// |alpha><alpha| renormalized after truncation. Warns when the discarded
/// tail weight exceeds 1e-6; `tail_weight` receives it when non-null.
DensityMatrix coherent_state(cplx alpha, int dim, double* tail_weight = nullptr);

DensityMatrix fock_state(int n, int dim);

/// Diagonal state with the given populations (not renormalized).
DensityMatrix diagonal_state(const std::vector<double>& populations);

cplx expectation(const Operator& op, const DensityMatrix& rho);
double photon_number(const DensityMatrix& rho);
double photon_var(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);
std::vector<double> photon_distribution(const DensityMatrix& rho);

/// (rho + rho^dag)/2 followed by trace renormalization.
DensityMatrix hermitize(const DensityMatrix& rho);

struct DensityDiagnostics {
  double trace_error = 0.0;      // |Tr rho - 1|
  double hermiticity_error = 0.0;  // max |rho - rho^dag|
  double min_eigenvalue = 0.0;   // of the Hermitian part
  bool trace_ok = true;
  bool hermitian_ok = true;
  bool positive_ok = true;

  bool ok() const { return trace_ok && hermitian_ok && positive_ok; }
};

DensityDiagnostics validate_density(const DensityMatrix& rho);

/// Returns a suggested larger dimension when the top Fock level carries
/// population above `threshold`, and emits a warning. Empty otherwise.
std::optional<int> check_truncation(const DensityMatrix& rho, double threshold = 1e-8);

}  // namespace qvdp
