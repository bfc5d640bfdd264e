// Copyright 2026 The CSB Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csb/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace csb {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kSlots = 3;
constexpr double kDedupTol = 1e-12;
constexpr double kPenaltyWeight = 10.0;
// Starting points sit slightly off the ideal phase so that a slot on the real
// axis still has a usable imaginary direction.
constexpr double kPhaseNudge = 0.05;
constexpr double kPadPhaseStep = 0.15;
constexpr double kPadShrink = 0.97;

VectorXd data_vector(const DecayCurve& curve) {
  return Eigen::Map<const VectorXd>(curve.p_hat.data(), static_cast<Eigen::Index>(curve.p_hat.size()));
}

void validate_curve(const DecayCurve& curve, std::size_t min_len, const char* who) {
  if (curve.p_hat.size() != curve.depths.size()) {
    throw DimensionError(std::string(who) + ": depths and p_hat differ in length");
  }
  if (curve.p_hat.size() < min_len) {
    throw DimensionError(std::string(who) + ": curve has " + std::to_string(curve.p_hat.size()) +
                         " points, need at least " + std::to_string(min_len));
  }
  for (std::size_t l = 0; l < curve.depths.size(); ++l) {
    if (curve.depths[l] != static_cast<int>(l)) {
      throw DimensionError(std::string(who) + ": depth grid must be 0, 1, 2, ...");
    }
  }
}

bool is_constant(const DecayCurve& curve) {
  const auto [lo, hi] = std::minmax_element(curve.p_hat.begin(), curve.p_hat.end());
  return *hi - *lo == 0.0;
}

ExponentialFit constant_fit(const DecayCurve& curve, ModelTag tag) {
  ExponentialFit fit;
  fit.a = curve.a;
  fit.b = curve.b;
  fit.model = tag;
  fit.terms = {Term{1.0, curve.p_hat.front()}};
  fit.rms_residual = 0.0;
  return fit;
}

/// Complex least squares for amplitudes at fixed bases, made conjugate closed.
std::vector<Term> amplitudes_for(const std::vector<cplx>& zs, const DecayCurve& curve) {
  const auto n = static_cast<Eigen::Index>(curve.p_hat.size());
  CMatrix vander(n, static_cast<Eigen::Index>(zs.size()));
  for (std::size_t k = 0; k < zs.size(); ++k) {
    cplx p = 1.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      vander(l, static_cast<Eigen::Index>(k)) = p;
      p *= zs[k];
    }
  }
  const CVector y = data_vector(curve).cast<cplx>();
  const CVector f = vander.completeOrthogonalDecomposition().solve(y);
  std::vector<Term> terms;
  for (std::size_t k = 0; k < zs.size(); ++k) terms.push_back({zs[k], f(static_cast<Eigen::Index>(k))});
  return terms;
}

/// Forces exact conjugate closure on a set that is closed up to round-off.
std::vector<Term> symmetrize(std::vector<Term> terms) {
  std::vector<bool> done(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (done[i]) continue;
    done[i] = true;
    if (terms[i].z.imag() == 0.0) {
      terms[i].f = terms[i].f.real();
      continue;
    }
    std::size_t best = terms.size();
    double best_dist = INFINITY;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (done[j]) continue;
      const double dist = std::abs(terms[j].z - std::conj(terms[i].z));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == terms.size()) {
      // Unpaired: project onto the real axis.
      terms[i].z = terms[i].z.real();
      terms[i].f = terms[i].f.real();
      continue;
    }
    done[best] = true;
    const cplx z = 0.5 * (terms[i].z + std::conj(terms[best].z));
    const cplx f = 0.5 * (terms[i].f + std::conj(terms[best].f));
    terms[i] = {z, f};
    terms[best] = {std::conj(z), std::conj(f)};
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Six-term problem in slot coordinates x = (Re z_1, Im z_1, ..., Re z_3, Im z_3).

class SlotProblem {
 public:
  SlotProblem(const VectorXd& y, double ridge, double bound)
      : y_(y), n_(y.size()), ridge_(ridge), bound_(bound) {}

  Eigen::Index residual_size() const { return n_ + 2 * kSlots + kSlots; }

  struct Evaluation {
    VectorXd residual;
    VectorXd coefficients;
    MatrixXd basis;  // augmented, (n + 2*slots) x (2*slots)
    double cost = 0.0;
  };

  Evaluation evaluate(const VectorXd& x) const {
    Evaluation e;
    const Eigen::Index m = 2 * kSlots;
    e.basis = MatrixXd::Zero(n_ + m, m);
    for (int j = 0; j < kSlots; ++j) {
      const cplx z(x(2 * j), x(2 * j + 1));
      cplx p = 1.0;
      for (Eigen::Index l = 0; l < n_; ++l) {
        e.basis(l, 2 * j) = p.real();
        e.basis(l, 2 * j + 1) = p.imag();
        p *= z;
      }
    }
    const double s = std::sqrt(ridge_);
    for (Eigen::Index k = 0; k < m; ++k) e.basis(n_ + k, k) = s;
    VectorXd target = VectorXd::Zero(n_ + m);
    target.head(n_) = y_;
    e.coefficients = e.basis.completeOrthogonalDecomposition().solve(target);
    e.residual.resize(residual_size());
    e.residual.head(n_ + m) = e.basis * e.coefficients - target;
    for (int j = 0; j < kSlots; ++j) {
      const double r = std::hypot(x(2 * j), x(2 * j + 1));
      e.residual(n_ + m + j) = kPenaltyWeight * std::max(0.0, r - bound_);
    }
    e.cost = 0.5 * e.residual.squaredNorm();
    return e;
  }

  /// Full variable-projection Jacobian of the residual, including the term
  /// from the dependence of the amplitudes on x; exact for the penalty rows.
  MatrixXd jacobian(const VectorXd& x, const Evaluation& e) const {
    const Eigen::Index m = 2 * kSlots;
    MatrixXd jac = MatrixXd::Zero(residual_size(), m);
    const auto cod = e.basis.completeOrthogonalDecomposition();
    const MatrixXd pinv_t = cod.pseudoInverse().transpose();
    const auto r_lin = e.residual.head(n_);
    for (int j = 0; j < kSlots; ++j) {
      const cplx z(x(2 * j), x(2 * j + 1));
      const double c0 = e.coefficients(2 * j);
      const double c1 = e.coefficients(2 * j + 1);
      // Derivatives of the two basis columns of slot j along Re z and Im z.
      VectorXd re_by_re = VectorXd::Zero(n_);
      VectorXd im_by_re = VectorXd::Zero(n_);
      cplx p = 1.0;  // z^(L-1)
      for (Eigen::Index l = 1; l < n_; ++l) {
        const cplx dz = static_cast<double>(l) * p;
        re_by_re(l) = dz.real();
        im_by_re(l) = dz.imag();
        p *= z;
      }
      // Along Im z the derivative is i L z^(L-1).
      const VectorXd re_by_im = -im_by_re;
      const VectorXd& im_by_im = re_by_re;
      const VectorXd* cols[2][2] = {{&re_by_re, &im_by_re}, {&re_by_im, &im_by_im}};
      for (int axis = 0; axis < 2; ++axis) {
        VectorXd dc = VectorXd::Zero(n_ + m);
        dc.head(n_) = c0 * *cols[axis][0] + c1 * *cols[axis][1];
        VectorXd dtr = VectorXd::Zero(m);
        dtr(2 * j) = cols[axis][0]->dot(r_lin);
        dtr(2 * j + 1) = cols[axis][1]->dot(r_lin);
        jac.col(2 * j + axis).head(n_ + m) = dc - e.basis * cod.solve(dc) - pinv_t * dtr;
      }
      const double r = std::abs(z);
      if (r > bound_) {
        jac(n_ + m + j, 2 * j) = kPenaltyWeight * z.real() / r;
        jac(n_ + m + j, 2 * j + 1) = kPenaltyWeight * z.imag() / r;
      }
    }
    return jac;
  }

  std::vector<Term> terms(const VectorXd& x, const Evaluation& e) const {
    std::vector<Term> out;
    for (int j = 0; j < kSlots; ++j) {
      const cplx z(x(2 * j), x(2 * j + 1));
      if (z.imag() == 0.0) {
        // The imaginary column vanishes; one real term carries the slot.
        out.push_back({z, e.coefficients(2 * j)});
        continue;
      }
      const cplx f = 0.5 * cplx(e.coefficients(2 * j), -e.coefficients(2 * j + 1));
      out.push_back({z, f});
      out.push_back({std::conj(z), std::conj(f)});
    }
    return out;
  }

 private:
  VectorXd y_;
  Eigen::Index n_;
  double ridge_;
  double bound_;
};

struct LmResult {
  VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// Adapter for Eigen's MINPACK-derived Levenberg-Marquardt driver.
struct SlotFunctor : Eigen::DenseFunctor<double> {
  explicit SlotFunctor(const SlotProblem& p)
      : Eigen::DenseFunctor<double>(2 * kSlots, static_cast<int>(p.residual_size())), problem(p) {}

  int operator()(const InputType& x, ValueType& fvec) const {
    fvec = problem.evaluate(x).residual;
    return 0;
  }
  int df(const InputType& x, JacobianType& fjac) const {
    fjac = problem.jacobian(x, problem.evaluate(x));
    return 0;
  }

  const SlotProblem& problem;
};

LmResult levenberg_marquardt(const SlotProblem& problem, VectorXd x, const SixTermOptions& opt) {
  using Eigen::LevenbergMarquardtSpace::Status;
  SlotFunctor functor(problem);
  Eigen::LevenbergMarquardt<SlotFunctor> lm(functor);
  lm.setMaxfev(100 * (opt.max_iterations + 1));
  lm.setGtol(0.0);  // the gradient rule below replaces MINPACK's cosine test

  auto gradient_norm = [&](const VectorXd& at) {
    const auto e = problem.evaluate(at);
    return (problem.jacobian(at, e).transpose() * e.residual).norm();
  };

  LmResult out;
  Status status = lm.minimizeInit(x);
  if (status == Status::ImproperInputParameters) {
    throw InvariantError("six_term_fit: improper optimizer input");
  }
  status = Status::Running;
  while (out.iterations < opt.max_iterations) {
    if (gradient_norm(x) < opt.gradient_tol) {
      out.converged = true;
      break;
    }
    status = lm.minimizeOneStep(x);
    ++out.iterations;
    if (status == Status::Running) continue;
    // Relative reduction, step size or machine precision limits: no further
    // progress is possible, so the iterate is stationary for our purposes.
    out.converged = status != Status::TooManyFunctionEvaluation && status != Status::UserAsked;
    break;
  }
  out.x = x;
  return out;
}

/// Radially pulls every slot with |z| above the bound back onto it.
void project_to_bound(VectorXd& x, double bound) {
  for (int j = 0; j < kSlots; ++j) {
    const double r = std::hypot(x(2 * j), x(2 * j + 1));
    if (r > bound) {
      x(2 * j) *= bound / r;
      x(2 * j + 1) *= bound / r;
    }
  }
}

VectorXd slots_from_terms(const std::vector<Term>& terms, double pad_scale) {
  // A conjugate pair contributes 2|f| to the curve, a real term |f|.
  std::vector<std::pair<double, cplx>> candidates;
  for (const auto& t : terms) {
    if (t.z.imag() > 0.0) candidates.emplace_back(2.0 * std::abs(t.f), t.z);
    if (t.z.imag() == 0.0) candidates.emplace_back(std::abs(t.f), t.z);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<cplx> slots;
  for (const auto& c : candidates) {
    if (slots.size() < kSlots) slots.push_back(c.second);
  }
  for (int k = 1; slots.size() < kSlots; ++k) {
    slots.push_back(std::polar(pad_scale * kPadShrink, kPadPhaseStep * k));
  }
  VectorXd x(2 * kSlots);
  for (int j = 0; j < kSlots; ++j) {
    x(2 * j) = slots[j].real();
    x(2 * j + 1) = slots[j].imag();
  }
  return x;
}

}  // namespace

std::string to_string(ModelTag tag) {
  return tag == ModelTag::kFourTermMp ? "four_term_mp" : "six_term_opt";
}

ModelTag model_tag_from_string(const std::string& name) {
  if (name == "four_term_mp") return ModelTag::kFourTermMp;
  if (name == "six_term_opt") return ModelTag::kSixTermOpt;
  throw std::invalid_argument("unknown model tag: " + name);
}

void check_conjugate_closed(std::span<const Term> terms, double tol) {
  std::vector<bool> used(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (used[i]) continue;
    const Term& t = terms[i];
    if (std::abs(t.z.imag()) <= tol && std::abs(t.f.imag()) <= tol) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(terms[j].z - std::conj(t.z)) <= tol &&
          std::abs(terms[j].f - std::conj(t.f)) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) throw InvariantError("terms are not closed under complex conjugation");
  }
}

double model_eval(std::span<const Term> terms, int depth) {
  check_conjugate_closed(terms);
  cplx sum = 0.0;
  for (const auto& t : terms) sum += t.f * std::pow(t.z, depth);
  if (std::abs(sum.imag()) > kModelImagTol) {
    throw InvariantError("model value has an imaginary residue");
  }
  return sum.real();
}

double rms_residual(std::span<const Term> terms, const DecayCurve& curve) {
  if (curve.p_hat.empty()) return 0.0;
  check_conjugate_closed(terms);
  double acc = 0.0;
  for (std::size_t l = 0; l < curve.p_hat.size(); ++l) {
    cplx sum = 0.0;
    for (const auto& t : terms) sum += t.f * std::pow(t.z, curve.depths[l]);
    const double r = sum.real() - curve.p_hat[l];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(curve.p_hat.size()));
}

ExponentialFit matrix_pencil_fit(const DecayCurve& curve, int order) {
  if (order < 1) throw InvariantError("matrix_pencil_fit: order must be positive");
  validate_curve(curve, static_cast<std::size_t>(2 * order), "matrix_pencil_fit");
  const VectorXd y = data_vector(curve);
  const Eigen::Index n = y.size();
  const Eigen::Index pencil = n / 2;

  MatrixXd hankel(n - pencil, pencil + 1);
  for (Eigen::Index i = 0; i < hankel.rows(); ++i) {
    for (Eigen::Index j = 0; j < hankel.cols(); ++j) hankel(i, j) = y(i + j);
  }
  Eigen::JacobiSVD<MatrixXd> svd(hankel, Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) throw InvariantError("matrix_pencil_fit: zero curve");
  int rank = 0;
  while (rank < order && rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;

  const MatrixXd v = svd.matrixV().leftCols(rank);
  const MatrixXd v1 = v.topRows(v.rows() - 1);
  const MatrixXd v2 = v.bottomRows(v.rows() - 1);
  const MatrixXd pencil_matrix = v1.completeOrthogonalDecomposition().solve(v2);
  Eigen::EigenSolver<MatrixXd> eig(pencil_matrix, false);
  std::vector<cplx> zs;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) zs.push_back(eig.eigenvalues()(k));

  ExponentialFit fit;
  fit.a = curve.a;
  fit.b = curve.b;
  fit.model = ModelTag::kFourTermMp;
  fit.rank_deficient = rank < order;
  fit.terms = symmetrize(amplitudes_for(zs, curve));
  fit.rms_residual = rms_residual(fit.terms, curve);
  return fit;
}

double envelope_decay(const DecayCurve& curve) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t l = 0; l < curve.p_hat.size(); ++l) {
    const double v = std::abs(curve.p_hat[l]);
    if (v <= 0.02) continue;
    const double x = curve.depths[l];
    const double ly = std::log(v);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++count;
  }
  double scale = 0.9;
  const double denom = count * sxx - sx * sx;
  if (count > 2 && denom > 0.0) scale = std::exp((count * sxy - sx * sy) / denom);
  return std::clamp(scale, 0.5, 1.0);
}

std::vector<Term> initialize_from_ideal(std::span<const cplx> ideal_pair_eigenvalues,
                                        const DecayCurve& curve) {
  if (ideal_pair_eigenvalues.empty()) {
    throw InvariantError("initialize_from_ideal: no ideal eigenvalues");
  }
  const double s = envelope_decay(curve);
  std::vector<cplx> zs;
  auto add_unique = [&zs](cplx z) {
    for (const auto& w : zs) {
      if (std::abs(w - z) < kDedupTol) return;
    }
    zs.push_back(z);
  };
  for (const auto& lam : ideal_pair_eigenvalues) {
    add_unique(s * lam);
    add_unique(s * std::conj(lam));
  }
  for (auto& z : zs) {
    if (std::abs(z.imag()) < kDedupTol) z = z.real();
  }
  add_unique(std::polar(s * kPadShrink, kPadPhaseStep));
  add_unique(std::polar(s * kPadShrink, -kPadPhaseStep));
  return symmetrize(amplitudes_for(zs, curve));
}

ExponentialFit six_term_fit(const DecayCurve& curve, std::span<const cplx> ideal_pair_eigenvalues,
                            const ExponentialFit* seed_fit, const SixTermOptions& options) {
  validate_curve(curve, 12, "six_term_fit");
  if (is_constant(curve)) return constant_fit(curve, ModelTag::kSixTermOpt);

  const std::vector<Term> start =
      seed_fit ? seed_fit->terms : initialize_from_ideal(ideal_pair_eigenvalues, curve);
  const double start_rms = rms_residual(start, curve);
  const double s = envelope_decay(curve);

  std::vector<VectorXd> starts;
  if (seed_fit) {
    starts.push_back(slots_from_terms(start, s));
  } else {
    // One slot per ideal value modulo conjugation, nudged off the ideal phase.
    std::vector<double> phases;
    for (const auto& lam : ideal_pair_eigenvalues) {
      const double ph = std::abs(std::arg(lam));
      bool seen = false;
      for (double p : phases) seen = seen || std::abs(p - ph) < 1e-9;
      if (!seen) phases.push_back(ph);
    }
    std::sort(phases.begin(), phases.end());
    std::vector<Term> slot_terms;
    for (double ph : phases) slot_terms.push_back({std::polar(s, ph + kPhaseNudge), 1.0});
    starts.push_back(slots_from_terms(slot_terms, s));
    if (options.pencil_start) {
      try {
        starts.push_back(slots_from_terms(matrix_pencil_fit(curve, 2 * kSlots).terms, s));
      } catch (const std::exception&) {
        // A pencil failure only removes the second start.
      }
    }
  }

  double ridge = 0.0;
  if (options.ridge) {
    ridge = *options.ridge;
  } else if (!curve.exact && curve.shots > 0) {
    double acc = 0.0;
    for (double p : curve.p_hat) acc += p * (1.0 - p);
    ridge = acc / static_cast<double>(curve.p_hat.size()) / curve.shots;
  }
  if (ridge < 0.0) throw InvariantError("six_term_fit: ridge must be non-negative");

  const SlotProblem problem(data_vector(curve), ridge, options.modulus_bound);
  LmResult best;
  double best_cost = INFINITY;
  for (const auto& x0 : starts) {
    LmResult lm = levenberg_marquardt(problem, x0, options);
    project_to_bound(lm.x, options.modulus_bound);
    const double cost = problem.evaluate(lm.x).cost;
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(lm);
    }
  }
  const auto final_eval = problem.evaluate(best.x);

  ExponentialFit fit;
  fit.a = curve.a;
  fit.b = curve.b;
  fit.model = ModelTag::kSixTermOpt;
  fit.terms = problem.terms(best.x, final_eval);
  fit.rms_residual = rms_residual(fit.terms, curve);
  fit.converged = best.converged;
  fit.iterations = best.iterations;
  if (!(fit.rms_residual <= start_rms)) {
    fit.terms = start;
    fit.rms_residual = start_rms;
  }
  return fit;
}

}  // namespace csb
