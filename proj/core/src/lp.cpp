#include "cab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cab::lp {

namespace {

constexpr int kRefinementSteps = 2;
constexpr int kRegularizationAttempts = 8;

// Factors `n` in place, adding a growing multiple of the mean diagonal when
// plain Cholesky fails.
bool regularized_llt(DenseMatrix& n, Eigen::LLT<DenseMatrix>& llt) {
  llt.compute(n);
  if (llt.info() == Eigen::Success) return true;
  const double scale = std::max(n.diagonal().cwiseAbs().mean(), 1e-300);
  double delta = 1e-14 * scale;
  for (int attempt = 0; attempt < kRegularizationAttempts; ++attempt) {
    n.diagonal().array() += delta;
    llt.compute(n);
    if (llt.info() == Eigen::Success) return true;
    delta *= 100.0;
  }
  return false;
}

double max_step(const DenseVector& z, const DenseVector& dz) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (dz(i) < 0.0) alpha = std::min(alpha, -z(i) / dz(i));
  }
  return alpha;
}

}  // namespace

bool DenseConstraint::factor(const DenseVector& d) {
  d_ = d;
  const DenseMatrix w = k_ * d.cwiseSqrt().asDiagonal();
  DenseMatrix n = DenseMatrix::Zero(k_.rows(), k_.rows());
  n.selfadjointView<Eigen::Lower>().rankUpdate(w);
  n.triangularView<Eigen::StrictlyUpper>() = n.transpose();
  return regularized_llt(n, llt_);
}

DenseVector DenseConstraint::solve(const DenseVector& r) const {
  DenseVector u = llt_.solve(r);
  for (int step = 0; step < kRefinementSteps; ++step) {
    const DenseVector resid = r - k_ * d_.cwiseProduct(k_.transpose() * u);
    u += llt_.solve(resid);
  }
  return u;
}

SplitL1Constraint::SplitL1Constraint(DenseMatrix m, bool with_identity)
    : m_(std::move(m)), with_identity_(with_identity) {}

Eigen::Index SplitL1Constraint::cols() const {
  return 2 * m_.cols() + (with_identity_ ? 2 * m_.rows() : 0);
}

DenseVector SplitL1Constraint::apply(const DenseVector& z) const {
  const Eigen::Index c = m_.cols();
  const Eigen::Index r = m_.rows();
  DenseVector out = m_ * (z.segment(0, c) - z.segment(c, c));
  if (with_identity_) out += z.segment(2 * c, r) - z.segment(2 * c + r, r);
  return out;
}

DenseVector SplitL1Constraint::apply_transpose(const DenseVector& v) const {
  const Eigen::Index c = m_.cols();
  const Eigen::Index r = m_.rows();
  DenseVector out(cols());
  const DenseVector mt = m_.transpose() * v;
  out.segment(0, c) = mt;
  out.segment(c, c) = -mt;
  if (with_identity_) {
    out.segment(2 * c, r) = v;
    out.segment(2 * c + r, r) = -v;
  }
  return out;
}

bool SplitL1Constraint::factor(const DenseVector& d) {
  const Eigen::Index c = m_.cols();
  const Eigen::Index r = m_.rows();
  du_ = d.segment(0, c) + d.segment(c, c);
  if (with_identity_) dv_ = d.segment(2 * c, r) + d.segment(2 * c + r, r);

  const DenseMatrix w = m_ * du_.cwiseSqrt().asDiagonal();
  DenseMatrix n = DenseMatrix::Zero(r, r);
  n.selfadjointView<Eigen::Lower>().rankUpdate(w);
  n.triangularView<Eigen::StrictlyUpper>() = n.transpose();
  if (with_identity_) n.diagonal() += dv_;
  return regularized_llt(n, llt_);
}

DenseVector SplitL1Constraint::normal_apply(const DenseVector& u) const {
  DenseVector out = m_ * du_.cwiseProduct(m_.transpose() * u);
  if (with_identity_) out += dv_.cwiseProduct(u);
  return out;
}

DenseVector SplitL1Constraint::solve(const DenseVector& r) const {
  DenseVector u = llt_.solve(r);
  for (int step = 0; step < kRefinementSteps; ++step) {
    u += llt_.solve(r - normal_apply(u));
  }
  return u;
}

LpResult solve_standard_form(ConstraintOperator& k, const DenseVector& b, const DenseVector& c,
                             const LpOptions& opts) {
  const Eigen::Index nvar = k.cols();
  if (b.size() != k.rows() || c.size() != nvar) {
    throw DimensionMismatch("solve_standard_form: b / c do not match K");
  }
  numerics::require_finite(b, "solve_standard_form(b)");
  numerics::require_finite(c, "solve_standard_form(c)");

  LpResult res;
  const double bnorm = b.norm();
  const double cnorm = c.norm();

  // Mehrotra's starting point from the least-squares primal / dual estimates.
  DenseVector z;
  DenseVector v;
  DenseVector s;
  if (!k.factor(DenseVector::Ones(nvar))) return res;
  z = k.apply_transpose(k.solve(b));
  v = k.solve(k.apply(c));
  s = c - k.apply_transpose(v);
  {
    const double dz = std::max(-1.5 * z.minCoeff(), 0.0);
    const double ds = std::max(-1.5 * s.minCoeff(), 0.0);
    z.array() += dz;
    s.array() += ds;
    const double zs = z.dot(s);
    if (zs > 0.0 && z.sum() > 0.0 && s.sum() > 0.0) {
      z.array() += 0.5 * zs / s.sum();
      s.array() += 0.5 * zs / z.sum();
    }
    if (!(z.array() > 0.0).all() || !(s.array() > 0.0).all() || !z.allFinite() || !s.allFinite()) {
      z.setOnes();
      s.setOnes();
      v.setZero();
    }
  }

  const double inv_n = 1.0 / static_cast<double>(nvar);
  for (std::size_t iter = 0;; ++iter) {
    const DenseVector rb = b - k.apply(z);
    const DenseVector rc = c - k.apply_transpose(v) - s;
    const double pobj = c.dot(z);
    const double dobj = b.dot(v);
    res.iterations = iter;
    res.primal_residual = rb.norm();
    res.dual_residual = rc.norm();
    res.duality_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    res.objective = pobj;

    if (!std::isfinite(res.primal_residual) || !std::isfinite(res.dual_residual) ||
        !std::isfinite(res.duality_gap)) {
      res.status = LpStatus::NumericalFailure;
      break;
    }
    if (res.primal_residual <= opts.feasibility_tolerance * (1.0 + bnorm) &&
        res.dual_residual <= opts.feasibility_tolerance * (1.0 + cnorm) &&
        res.duality_gap <= opts.gap_tolerance) {
      res.status = LpStatus::Optimal;
      break;
    }
    if (iter >= opts.max_iterations) {
      res.status = LpStatus::IterationLimit;
      break;
    }

    const double mu = z.dot(s) * inv_n;
    const DenseVector d = z.cwiseQuotient(s);
    if (!k.factor(d)) {
      res.status = LpStatus::NumericalFailure;
      break;
    }

    // Affine-scaling predictor: complementarity target 0.
    const DenseVector dc = d.cwiseProduct(rc);
    DenseVector dv_aff = k.solve(rb + k.apply(dc + z));
    DenseVector ds_aff = rc - k.apply_transpose(dv_aff);
    DenseVector dz_aff = -z - d.cwiseProduct(ds_aff);
    const double ap_aff = max_step(z, dz_aff);
    const double ad_aff = max_step(s, ds_aff);
    const double mu_aff = (z + ap_aff * dz_aff).dot(s + ad_aff * ds_aff) * inv_n;
    const double sigma = std::pow(mu_aff / mu, 3);

    // Corrector: centering plus second-order term.
    const DenseVector rxs =
        (-z.cwiseProduct(s) - dz_aff.cwiseProduct(ds_aff)).array() + sigma * mu;
    const DenseVector dv = k.solve(rb + k.apply(dc - rxs.cwiseQuotient(s)));
    const DenseVector ds = rc - k.apply_transpose(dv);
    const DenseVector dz = (rxs - z.cwiseProduct(ds)).cwiseQuotient(s);

    const double eta = std::max(0.9, 1.0 - 10.0 * mu);
    const double eta_c = std::min(eta, 0.9999);
    const double ap = std::min(1.0, eta_c * max_step(z, dz));
    const double ad = std::min(1.0, eta_c * max_step(s, ds));
    z += ap * dz;
    v += ad * dv;
    s += ad * ds;
  }

  res.z = std::move(z);
  res.v = std::move(v);
  res.s = std::move(s);
  return res;
}

}  // namespace cab::lp
