#pragma once

// Planewave bases of L^2_per[0, L) in one dimension.
//
// Modes are ordered by |k| and then by sign: index 0 -> k = 0, index 2j-1 ->
// k = +j, index 2j -> k = -j. A basis with a smaller cutoff is therefore a
// prefix of any larger one, and the window X_N (-) X_M is the contiguous
// index range [dim X_M, dim X_N) of X_N. All matrices in the library use this
// ordering.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fsm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Whether the cutoff M keeps modes with (2 pi k / L)^2 < rho_M (|k| <= M-1)
// or <= rho_M (|k| <= M).
enum class CutoffConvention { StrictlyBelow, UpTo };

const char* to_string(CutoffConvention c);
CutoffConvention parse_convention(const std::string& s);

// Frequency of the mode stored at position `index` in the canonical ordering.
int frequency_at(std::size_t index);
// Inverse of frequency_at.
std::size_t index_of_frequency(int k);

class PlanewaveBasis {
 public:
  PlanewaveBasis(double period, int cutoff, CutoffConvention convention = CutoffConvention::StrictlyBelow);

  double period() const noexcept { return period_; }
  int cutoff() const noexcept { return cutoff_; }
  CutoffConvention convention() const noexcept { return convention_; }

  // Largest |k| kept by the basis.
  int max_frequency() const noexcept;
  std::size_t dimension() const noexcept { return 2 * static_cast<std::size_t>(max_frequency()) + 1; }

  int frequency(std::size_t index) const { return frequency_at(index); }
  double laplacian_eigenvalue(int k) const noexcept;
  // rho_M = (2 pi M / L)^2
  double rho() const noexcept;

  bool compatible_with(const PlanewaveBasis& other) const noexcept;

 private:
  double period_;
  int cutoff_;
  CutoffConvention convention_;
};

// Ran(P_hi - P_lo): the modes of `hi` that are not in `lo`.
class IndexWindow {
 public:
  IndexWindow(PlanewaveBasis lo, PlanewaveBasis hi);

  const PlanewaveBasis& lo() const noexcept { return lo_; }
  const PlanewaveBasis& hi() const noexcept { return hi_; }
  std::size_t offset() const noexcept { return lo_.dimension(); }
  std::size_t dimension() const noexcept { return hi_.dimension() - lo_.dimension(); }
  bool empty() const noexcept { return dimension() == 0; }
  int frequency(std::size_t j) const { return frequency_at(offset() + j); }
  // Smallest Laplacian eigenvalue in the window (rho_M under StrictlyBelow).
  double lower_edge() const noexcept;

 private:
  PlanewaveBasis lo_;
  PlanewaveBasis hi_;
};

// Contiguous run of canonical mode indices with the geometry needed to build
// matrices on it. Both bases and windows convert to this.
struct ModeRange {
  double period;
  CutoffConvention convention;
  std::size_t offset;
  std::size_t size;

  ModeRange(const PlanewaveBasis& b);  // NOLINT: implicit by intent
  ModeRange(const IndexWindow& w);     // NOLINT
  int frequency(std::size_t j) const { return frequency_at(offset + j); }
};

// V_t family: V_0 = v0, V_n = amplitude / |n|^t.
struct PowerLawFamily {
  double t;
  double v0 = -10.0;
  double amplitude = -5.0;
};

// Real periodic potential given by its Fourier coefficients. Coefficients are
// Hermitian-symmetric, V_{-n} = conj(V_n).
class FourierPotential {
 public:
  static FourierPotential zero(double period);
  static FourierPotential constant(double period, double value);
  // Throws ConfigError if the map violates Hermitian symmetry or V_0 is not real.
  static FourierPotential from_coefficients(double period, const std::map<int, cplx>& coeffs);
  static FourierPotential power_law(double period, PowerLawFamily family);

  double period() const noexcept { return period_; }
  cplx coefficient(int n) const;
  // nullopt for analytic families, whose support is unbounded.
  std::optional<int> max_stored_frequency() const;
  const std::optional<PowerLawFamily>& family() const noexcept { return family_; }
  // All coefficients real, so every potential block is real symmetric.
  bool has_real_coefficients() const noexcept { return real_; }

  FourierPotential scaled(double factor) const;

 private:
  FourierPotential(double period) : period_(period) {}

  double period_;
  std::vector<cplx> table_;  // n = 0 .. max_stored
  std::optional<PowerLawFamily> family_;
  double scale_ = 1.0;
  bool real_ = true;
};

// (2 pi k / L)^2 per mode of the basis.
RVector laplacian_diagonal(const PlanewaveBasis& basis);

// Matrix with entries V_{k - k'}, k over rows, k' over cols.
CMatrix potential_block(const FourierPotential& v, const ModeRange& rows, const ModeRange& cols);

// ||(1 - Delta)^{(r-1)/2} V (1 - Delta)^{(r-1)/2}|| truncated to |k| <= audit_cutoff.
double regularity_norm(const FourierPotential& v, double r, int audit_cutoff);

struct RegularityNormEstimate {
  double value = 0.0;      // at audit_cutoff
  double coarser = 0.0;    // at audit_cutoff / 2
  int audit_cutoff = 0;
  double relative_change = 0.0;
  bool converged = false;  // relative_change < 1e-3
};

// regularity_norm at audit_cutoff plus the cutoff-halving convergence check.
RegularityNormEstimate estimate_regularity_norm(const FourierPotential& v, double r, int audit_cutoff);

// kappa_M = rho_M - (rho_M + 1) rho_M^{-r} ||V||_r
double kappa(const PlanewaveBasis& coarse, double r, double norm_v_r);

// Diagonal weights (1 + (2 pi k / L)^2)^{(r-1)/2} on a mode range.
RVector regularity_weights(const ModeRange& modes, double r);

}  // namespace fsm
