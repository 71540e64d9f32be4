#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lrflow {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

/// optimize objective^T x  s.t.  constraints * x <= bounds,  lower <= x <= upper.
/// Lower bounds may be -inf and upper bounds +inf.
template <typename Scalar>
struct LinearProgram {
  Sense sense = Sense::Minimize;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> objective;
  Matrix<Scalar> constraints;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bounds;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lower;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> upper;

  /// n variables, no rows, 0 <= x < inf.
  static LinearProgram nonnegative(Eigen::Index n, Sense sense = Sense::Minimize) {
    LinearProgram lp;
    lp.sense = sense;
    lp.objective = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
    lp.constraints = Matrix<Scalar>::Zero(0, n);
    lp.bounds = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(0);
    lp.lower = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
    lp.upper = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, std::numeric_limits<Scalar>::infinity());
    return lp;
  }

  /// Appends the row  coeffs^T x <= rhs.
  template <typename Derived>
  void add_row(const Eigen::MatrixBase<Derived>& coeffs, Scalar rhs) {
    const Eigen::Index r = constraints.rows();
    constraints.conservativeResize(r + 1, Eigen::NoChange);
    constraints.row(r) = coeffs.transpose();
    bounds.conservativeResize(r + 1);
    bounds[r] = rhs;
  }

  Eigen::Index variables() const { return objective.size(); }
};

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar objective = 0;
  int pivots = 0;
};

namespace detail {

// Bounded-variable substitution x = offset + map * y with y >= 0.
template <typename Scalar>
struct StandardForm {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offset;
  Matrix<Scalar> map;
  Matrix<Scalar> rows;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> cost;
};

template <typename Scalar>
StandardForm<Scalar> to_standard_form(const LinearProgram<Scalar>& lp) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = lp.variables();
  if (lp.constraints.cols() != n || lp.bounds.size() != lp.constraints.rows() || lp.lower.size() != n ||
      lp.upper.size() != n) {
    throw std::invalid_argument("linear program dimensions are inconsistent");
  }

  std::vector<std::pair<Eigen::Index, Scalar>> columns;  // (variable, sign)
  std::vector<std::pair<Eigen::Index, Scalar>> caps;     // (column, width) rows y_col <= width
  Vec offset = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower[j]);
    const bool hi = std::isfinite(lp.upper[j]);
    if (lo) {
      if (hi && lp.upper[j] < lp.lower[j]) throw std::invalid_argument("variable with upper < lower");
      offset[j] = lp.lower[j];
      if (hi) caps.emplace_back(static_cast<Eigen::Index>(columns.size()), lp.upper[j] - lp.lower[j]);
      columns.emplace_back(j, Scalar(1));
    } else if (hi) {
      offset[j] = lp.upper[j];
      columns.emplace_back(j, Scalar(-1));
    } else {
      columns.emplace_back(j, Scalar(1));
      columns.emplace_back(j, Scalar(-1));
    }
  }

  StandardForm<Scalar> sf;
  const auto cols = static_cast<Eigen::Index>(columns.size());
  sf.offset = offset;
  sf.map = Matrix<Scalar>::Zero(n, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    sf.map(columns[static_cast<std::size_t>(k)].first, k) = columns[static_cast<std::size_t>(k)].second;
  }

  const Eigen::Index m = lp.constraints.rows();
  const auto extra = static_cast<Eigen::Index>(caps.size());
  sf.rows = Matrix<Scalar>::Zero(m + extra, cols);
  sf.rhs = Vec::Zero(m + extra);
  sf.rows.topRows(m) = lp.constraints * sf.map;
  sf.rhs.head(m) = lp.bounds - lp.constraints * offset;
  for (Eigen::Index k = 0; k < extra; ++k) {
    sf.rows(m + k, caps[static_cast<std::size_t>(k)].first) = Scalar(1);
    sf.rhs[m + k] = caps[static_cast<std::size_t>(k)].second;
  }

  const Scalar sign = lp.sense == Sense::Maximize ? Scalar(-1) : Scalar(1);
  sf.cost = sign * (sf.map.transpose() * lp.objective);
  return sf;
}

// Tableau with the right-hand side in the last column and a reduced-cost row.
template <typename Scalar>
class Tableau {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Tableau(Matrix<Scalar> body, std::vector<Eigen::Index> basis, Scalar tol)
      : t_(std::move(body)), basis_(std::move(basis)), tol_(tol) {}

  Eigen::Index rows() const { return t_.rows(); }
  Eigen::Index columns() const { return t_.cols() - 1; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  Scalar rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }
  Scalar entry(Eigen::Index r, Eigen::Index c) const { return t_(r, c); }

  // Reduced costs of `cost` relative to the current basis; last entry is -z.
  void price(const Vec& cost) {
    z_ = Vec::Zero(t_.cols());
    z_.head(cost.size()) = cost;
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const Scalar cb = basis_[static_cast<std::size_t>(r)] < cost.size() ? cost[basis_[static_cast<std::size_t>(r)]]
                                                                         : Scalar(0);
      if (cb != Scalar(0)) z_ -= cb * t_.row(r).transpose();
    }
  }

  Scalar objective() const { return -z_[z_.size() - 1]; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (i != r && t_(i, c) != Scalar(0)) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    if (z_.size() > 0 && z_[c] != Scalar(0)) z_ -= z_[c] * t_.row(r).transpose();
    basis_[static_cast<std::size_t>(r)] = c;
    ++pivots_;
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving basic
  // variable among ratio ties. Columns at or beyond `usable` never enter.
  LpStatus optimize(Eigen::Index usable) {
    constexpr int kMaxPivots = 200000;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < usable; ++c) {
        if (z_[c] < -tol_) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      Eigen::Index leave = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        if (t_(r, enter) <= tol_) continue;
        const Scalar ratio = rhs(r) / t_(r, enter);
        if (ratio < best - tol_ ||
            (ratio <= best + tol_ && leave >= 0 &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          if (ratio < best) best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
      if (pivots_ > kMaxPivots) throw std::runtime_error("simplex pivot limit exceeded");
    }
  }

  void drop_row(Eigen::Index r) {
    const Eigen::Index last = rows() - 1;
    if (r != last) {
      t_.row(r) = t_.row(last);
      basis_[static_cast<std::size_t>(r)] = basis_[static_cast<std::size_t>(last)];
    }
    t_.conservativeResize(last, Eigen::NoChange);
    basis_.pop_back();
  }

  int pivots() const { return pivots_; }

 private:
  Matrix<Scalar> t_;
  std::vector<Eigen::Index> basis_;
  Vec z_;
  Scalar tol_;
  int pivots_ = 0;
};

}  // namespace detail

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
/// Infeasible and unbounded programs are reported through the status.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, Scalar tolerance = Scalar(1e-8)) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  detail::StandardForm<Scalar> sf = detail::to_standard_form(lp);
  const Eigen::Index m = sf.rows.rows();
  const Eigen::Index nv = sf.rows.cols();

  // Columns: structural | slack | artificial | rhs.
  std::vector<Eigen::Index> needs_artificial;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (sf.rhs[r] < Scalar(0)) needs_artificial.push_back(r);
  }
  const auto na = static_cast<Eigen::Index>(needs_artificial.size());
  const Eigen::Index first_artificial = nv + m;
  Matrix<Scalar> body = Matrix<Scalar>::Zero(m, nv + m + na + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) {
    body.row(r).head(nv) = sf.rows.row(r);
    body(r, nv + r) = Scalar(1);
    body(r, body.cols() - 1) = sf.rhs[r];
    basis[static_cast<std::size_t>(r)] = nv + r;
  }
  for (Eigen::Index k = 0; k < na; ++k) {
    const Eigen::Index r = needs_artificial[static_cast<std::size_t>(k)];
    body.row(r) *= Scalar(-1);
    body(r, first_artificial + k) = Scalar(1);
    basis[static_cast<std::size_t>(r)] = first_artificial + k;
  }

  detail::Tableau<Scalar> tab(std::move(body), std::move(basis), tolerance);
  LpSolution<Scalar> out;

  if (na > 0) {
    Vec phase1 = Vec::Zero(first_artificial + na);
    phase1.tail(na).setOnes();
    tab.price(phase1);
    tab.optimize(first_artificial + na);
    const Scalar scale = std::max(Scalar(1), sf.rhs.cwiseAbs().maxCoeff());
    if (tab.objective() > tolerance * scale) {
      out.status = LpStatus::Infeasible;
      out.pivots = tab.pivots();
      return out;
    }
    // Drive zero-level artificials out of the basis; rows that cannot be
    // pivoted are redundant.
    for (Eigen::Index r = tab.rows(); r-- > 0;) {
      if (tab.basis()[static_cast<std::size_t>(r)] < first_artificial) continue;
      Eigen::Index col = -1;
      for (Eigen::Index c = 0; c < first_artificial; ++c) {
        if (std::abs(tab.entry(r, c)) > tolerance) {
          col = c;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(r, col);
      } else {
        tab.drop_row(r);
      }
    }
  }

  Vec phase2 = Vec::Zero(first_artificial);
  phase2.head(nv) = sf.cost;
  tab.price(phase2);
  const LpStatus status = tab.optimize(first_artificial);
  out.pivots = tab.pivots();
  if (status == LpStatus::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  Vec y = Vec::Zero(nv);
  for (Eigen::Index r = 0; r < tab.rows(); ++r) {
    const Eigen::Index b = tab.basis()[static_cast<std::size_t>(r)];
    if (b < nv) y[b] = tab.rhs(r);
  }
  out.status = LpStatus::Optimal;
  out.x = sf.offset + sf.map * y;
  out.objective = lp.objective.dot(out.x);
  return out;
}

}  // namespace lrflow
