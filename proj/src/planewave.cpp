#include "fsm/planewave.hpp"

#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fsm {

const char* to_string(CutoffConvention c) {
  return c == CutoffConvention::StrictlyBelow ? "strictly_below" : "up_to";
}

CutoffConvention parse_convention(const std::string& s) {
  if (s == "strictly_below" || s == "StrictlyBelow") return CutoffConvention::StrictlyBelow;
  if (s == "up_to" || s == "UpTo") return CutoffConvention::UpTo;
  throw ConfigError("convention: expected \"strictly_below\" or \"up_to\", got \"" + s + "\"");
}

int frequency_at(std::size_t index) {
  if (index == 0) return 0;
  const int j = static_cast<int>((index + 1) / 2);
  return (index % 2 == 1) ? j : -j;
}

std::size_t index_of_frequency(int k) {
  if (k == 0) return 0;
  const auto j = static_cast<std::size_t>(std::abs(k));
  return k > 0 ? 2 * j - 1 : 2 * j;
}

PlanewaveBasis::PlanewaveBasis(double period, int cutoff, CutoffConvention convention)
    : period_(period), cutoff_(cutoff), convention_(convention) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("PlanewaveBasis: period L must be positive and finite");
  }
  if (cutoff < 0 || (convention == CutoffConvention::StrictlyBelow && cutoff < 1)) {
    std::ostringstream os;
    os << "PlanewaveBasis: cutoff " << cutoff << " is invalid for convention " << to_string(convention);
    throw ConfigError(os.str());
  }
}

int PlanewaveBasis::max_frequency() const noexcept {
  return convention_ == CutoffConvention::StrictlyBelow ? cutoff_ - 1 : cutoff_;
}

double PlanewaveBasis::laplacian_eigenvalue(int k) const noexcept {
  const double g = 2.0 * std::numbers::pi * k / period_;
  return g * g;
}

double PlanewaveBasis::rho() const noexcept { return laplacian_eigenvalue(cutoff_); }

bool PlanewaveBasis::compatible_with(const PlanewaveBasis& other) const noexcept {
  return period_ == other.period_ && convention_ == other.convention_;
}

IndexWindow::IndexWindow(PlanewaveBasis lo, PlanewaveBasis hi) : lo_(lo), hi_(hi) {
  if (!lo_.compatible_with(hi_)) {
    throw ConfigError("IndexWindow: bases differ in period or cutoff convention");
  }
  if (hi_.cutoff() < lo_.cutoff()) {
    throw ConfigError("IndexWindow: upper cutoff is below the lower cutoff");
  }
}

double IndexWindow::lower_edge() const noexcept {
  return hi_.laplacian_eigenvalue(lo_.max_frequency() + 1);
}

ModeRange::ModeRange(const PlanewaveBasis& b)
    : period(b.period()), convention(b.convention()), offset(0), size(b.dimension()) {}

ModeRange::ModeRange(const IndexWindow& w)
    : period(w.hi().period()), convention(w.hi().convention()), offset(w.offset()), size(w.dimension()) {}

FourierPotential FourierPotential::zero(double period) {
  FourierPotential v(period);
  v.table_ = {cplx(0.0)};
  return v;
}

FourierPotential FourierPotential::constant(double period, double value) {
  FourierPotential v(period);
  v.table_ = {cplx(value)};
  return v;
}

FourierPotential FourierPotential::from_coefficients(double period, const std::map<int, cplx>& coeffs) {
  if (!(period > 0.0)) throw ConfigError("potential: L must be positive");
  int max_n = 0;
  double scale = 0.0;
  for (const auto& [n, c] : coeffs) {
    max_n = std::max(max_n, std::abs(n));
    scale = std::max(scale, std::abs(c));
  }
  const double tol = 1e-14 * std::max(1.0, scale);
  FourierPotential v(period);
  v.table_.assign(static_cast<std::size_t>(max_n) + 1, cplx(0.0));
  for (const auto& [n, c] : coeffs) {
    if (n < 0) {
      if (auto partner = coeffs.find(-n); partner != coeffs.end() && std::abs(partner->second - std::conj(c)) > tol) {
        std::ostringstream os;
        os << "potential: coefficients for n = " << -n << " and n = " << n
           << " violate V_{-n} = conj(V_n); the potential must be real";
        throw ConfigError(os.str());
      }
      v.table_[static_cast<std::size_t>(-n)] = std::conj(c);
    }
  }
  // Nonnegative frequencies take precedence over their mirrored partners.
  for (const auto& [n, c] : coeffs) {
    if (n >= 0) v.table_[static_cast<std::size_t>(n)] = c;
  }
  if (std::abs(v.table_[0].imag()) > tol) {
    throw ConfigError("potential: V_0 must be real");
  }
  v.table_[0] = cplx(v.table_[0].real(), 0.0);
  for (const cplx& c : v.table_) {
    if (c.imag() != 0.0) v.real_ = false;
  }
  return v;
}

FourierPotential FourierPotential::power_law(double period, PowerLawFamily family) {
  if (!(period > 0.0)) throw ConfigError("potential: L must be positive");
  if (!std::isfinite(family.t)) throw ConfigError("potential: family parameter t must be finite");
  FourierPotential v(period);
  v.family_ = family;
  return v;
}

cplx FourierPotential::coefficient(int n) const {
  cplx c;
  if (family_) {
    c = n == 0 ? cplx(family_->v0) : cplx(family_->amplitude / std::pow(std::abs(n), family_->t));
  } else {
    const auto slot = static_cast<std::size_t>(std::abs(n));
    if (slot >= table_.size()) return cplx(0.0);
    c = n >= 0 ? table_[slot] : std::conj(table_[slot]);
  }
  return scale_ * c;
}

std::optional<int> FourierPotential::max_stored_frequency() const {
  if (family_) return std::nullopt;
  return static_cast<int>(table_.size()) - 1;
}

FourierPotential FourierPotential::scaled(double factor) const {
  FourierPotential v = *this;
  v.scale_ *= factor;
  return v;
}

RVector laplacian_diagonal(const PlanewaveBasis& basis) {
  RVector d(static_cast<Eigen::Index>(basis.dimension()));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d[i] = basis.laplacian_eigenvalue(basis.frequency(static_cast<std::size_t>(i)));
  }
  return d;
}

CMatrix potential_block(const FourierPotential& v, const ModeRange& rows, const ModeRange& cols) {
  if (rows.period != cols.period || rows.convention != cols.convention) {
    throw ConfigError("potential_block: row and column modes differ in period or convention");
  }
  if (v.period() != rows.period) {
    throw ConfigError("potential_block: potential period does not match the basis period");
  }
  // Cache coefficients over the needed difference range.
  int kmax = 0;
  for (std::size_t i : {rows.offset, rows.offset + rows.size, cols.offset, cols.offset + cols.size}) {
    kmax = std::max(kmax, std::abs(frequency_at(i)) + 1);
  }
  std::vector<cplx> coeff(2 * static_cast<std::size_t>(2 * kmax) + 1);
  for (int n = -2 * kmax; n <= 2 * kmax; ++n) coeff[static_cast<std::size_t>(n + 2 * kmax)] = v.coefficient(n);

  CMatrix out(static_cast<Eigen::Index>(rows.size), static_cast<Eigen::Index>(cols.size));
  for (std::size_t j = 0; j < cols.size; ++j) {
    const int kc = cols.frequency(j);
    for (std::size_t i = 0; i < rows.size; ++i) {
      const int kr = rows.frequency(i);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          coeff[static_cast<std::size_t>(kr - kc + 2 * kmax)];
    }
  }
  return out;
}

RVector regularity_weights(const ModeRange& modes, double r) {
  RVector w(static_cast<Eigen::Index>(modes.size));
  for (std::size_t j = 0; j < modes.size; ++j) {
    const double g = 2.0 * std::numbers::pi * modes.frequency(j) / modes.period;
    w[static_cast<Eigen::Index>(j)] = std::pow(1.0 + g * g, 0.5 * (r - 1.0));
  }
  return w;
}

double regularity_norm(const FourierPotential& v, double r, int audit_cutoff) {
  if (!(r >= 0.0)) throw ConfigError("regularity_norm: r must be nonnegative");
  if (audit_cutoff < 0) throw ConfigError("regularity_norm: audit cutoff must be nonnegative");
  const PlanewaveBasis basis(v.period(), audit_cutoff, CutoffConvention::UpTo);
  const RVector w = regularity_weights(basis, r);
  return hermitian_norm(scale_rows_cols(potential_block(v, basis, basis), w, w));
}

RegularityNormEstimate estimate_regularity_norm(const FourierPotential& v, double r, int audit_cutoff) {
  RegularityNormEstimate e;
  e.audit_cutoff = audit_cutoff;
  e.value = regularity_norm(v, r, audit_cutoff);
  e.coarser = regularity_norm(v, r, audit_cutoff / 2);
  e.relative_change = e.value == 0.0 ? 0.0 : (e.value - e.coarser) / e.value;
  e.converged = e.relative_change < 1e-3;
  return e;
}

double kappa(const PlanewaveBasis& coarse, double r, double norm_v_r) {
  const double rho = coarse.rho();
  return rho - (rho + 1.0) * std::pow(rho, -r) * norm_v_r;
}

}  // namespace fsm
