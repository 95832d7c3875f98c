// Copyright 2026 The looploc Authors
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

#pragma once

// Interaction-picture generator and dissipative dynamics of the four-level
// diamond scheme (|1> ground, |2>,|4> intermediate, |3> excited).
//
// Density matrices are flattened row-major: vec(rho)[4*r + c] = rho(r, c).
// In this ordering vec(A rho B) = kron(A, B^T) vec(rho).

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "looploc/errors.hpp"

namespace looploc {

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

template <typename Scalar>
using Superoperator = Eigen::Matrix<std::complex<Scalar>, 16, 16>;

template <typename Scalar>
using Vector16c = Eigen::Matrix<std::complex<Scalar>, 16, 1>;

/// Drive strengths in units of gamma.
///
/// Either uniform (every Rabi frequency equals x) or an explicit list in the
/// order (g21, g32, g34, g41). Explicit entries may be zero to switch a
/// transition off.
template <typename Scalar>
struct DriveParams {
  Scalar x = Scalar(1);
  std::optional<std::array<Scalar, 4>> per_transition_g;

  static DriveParams uniform(Scalar x_) {
    if (!(x_ > Scalar(0))) throw std::invalid_argument("drive strength x must be positive");
    return DriveParams{x_, std::nullopt};
  }

  static DriveParams explicit_couplings(const std::array<Scalar, 4>& g) {
    for (Scalar v : g) {
      if (!(v >= Scalar(0))) throw std::invalid_argument("couplings must be non-negative");
    }
    return DriveParams{Scalar(1), g};
  }

  std::array<Scalar, 4> couplings() const {
    return per_transition_g ? *per_transition_g : std::array<Scalar, 4>{x, x, x, x};
  }

  bool is_uniform() const { return !per_transition_g.has_value(); }
};

/// Half-rates gamma_ji of the four decay channels, ordered
/// (3->2, 3->4, 2->1, 4->1). Each channel contributes total rate 2*gamma_ji.
template <typename Scalar>
struct DecayModel {
  std::array<Scalar, 4> rates{Scalar(1), Scalar(1), Scalar(1), Scalar(1)};

  static DecayModel unit() { return DecayModel{}; }

  static DecayModel from_rates(const std::array<Scalar, 4>& r) {
    for (Scalar v : r) {
      if (!(v > Scalar(0))) throw std::invalid_argument("decay rates must be positive");
    }
    return DecayModel{r};
  }

  Scalar gamma32() const { return rates[0]; }
  Scalar gamma34() const { return rates[1]; }
  Scalar gamma21() const { return rates[2]; }
  Scalar gamma41() const { return rates[3]; }
};

/// Validated 4x4 density matrix.
template <typename Scalar>
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(const Matrix4c<Scalar>& rho) : rho_(rho) {
    using std::abs;
    const Scalar tol = Scalar(kTolerance);
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (abs(rho_.trace() - std::complex<Scalar>(1)) > tol) {
      throw std::invalid_argument("density matrix trace differs from 1");
    }
    for (int i = 0; i < 4; ++i) {
      if (rho_(i, i).real() < -tol) {
        throw std::invalid_argument("density matrix has a negative population");
      }
    }
  }

  static DensityMatrix pure(int level) {
    Matrix4c<Scalar> m = Matrix4c<Scalar>::Zero();
    m(level - 1, level - 1) = Scalar(1);
    return DensityMatrix(m);
  }

  const Matrix4c<Scalar>& matrix() const noexcept { return rho_; }
  std::complex<Scalar> operator()(int r, int c) const { return rho_(r, c); }

 private:
  Matrix4c<Scalar> rho_;
};

/// Matrix unit |i><j| with 1-based level labels.
template <typename Scalar>
Matrix4c<Scalar> transition_operator(int i, int j) {
  Matrix4c<Scalar> a = Matrix4c<Scalar>::Zero();
  a(i - 1, j - 1) = Scalar(1);
  return a;
}

/// Interaction-picture Hamiltonian V/hbar in units of gamma.
///
/// `detunings` holds (Delta21, Delta32, Delta41). The loop phase sits on the
/// |2>-|3> coupling only.
template <typename Scalar>
Matrix4c<Scalar> build_generator(Scalar phi, const DriveParams<Scalar>& drives,
                                 const std::array<Scalar, 3>& detunings) {
  using std::cos;
  using std::sin;
  using C = std::complex<Scalar>;
  const auto g = drives.couplings();
  Matrix4c<Scalar> v = Matrix4c<Scalar>::Zero();
  v(1, 1) = -detunings[0];
  v(2, 2) = -(detunings[0] + detunings[1]);
  v(3, 3) = -detunings[2];

  const C loop_factor(cos(phi), -sin(phi));
  const auto couple = [&v](int i, int j, C value) {
    v(i - 1, j - 1) += value;
    v(j - 1, i - 1) += std::conj(value);
  };
  couple(2, 1, C(g[0]));
  couple(3, 2, g[1] * loop_factor);
  couple(3, 4, C(g[2]));
  couple(4, 1, C(g[3]));
  return v;
}

/// Superoperator of rho -> -i[V, rho] + sum_ch 2*gamma (A rho A^+ - {A^+A, rho}/2)
/// acting on the row-major flattening of rho.
template <typename Scalar>
Superoperator<Scalar> build_liouvillian(const Matrix4c<Scalar>& v,
                                        const DecayModel<Scalar>& decay) {
  using C = std::complex<Scalar>;
  const Matrix4c<Scalar> id = Matrix4c<Scalar>::Identity();
  const C minus_i(Scalar(0), Scalar(-1));

  Superoperator<Scalar> l =
      minus_i * (Eigen::kroneckerProduct(v, id).eval() -
                 Eigen::kroneckerProduct(id, v.transpose()).eval());

  struct Channel {
    int lower;
    int upper;
    Scalar half_rate;
  };
  const std::array<Channel, 4> channels{{{2, 3, decay.gamma32()},
                                         {4, 3, decay.gamma34()},
                                         {1, 2, decay.gamma21()},
                                         {1, 4, decay.gamma41()}}};
  for (const auto& ch : channels) {
    const Matrix4c<Scalar> a = transition_operator<Scalar>(ch.lower, ch.upper);
    const Matrix4c<Scalar> ada = a.adjoint() * a;
    const Scalar rate = Scalar(2) * ch.half_rate;
    l += rate * (Eigen::kroneckerProduct(a, a.conjugate()).eval() -
                 Scalar(0.5) * Eigen::kroneckerProduct(ada, id).eval() -
                 Scalar(0.5) * Eigen::kroneckerProduct(id, ada.transpose()).eval());
  }
  return l;
}

template <typename Scalar>
Vector16c<Scalar> flatten(const Matrix4c<Scalar>& rho) {
  Vector16c<Scalar> out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(4 * r + c) = rho(r, c);
  return out;
}

template <typename Scalar>
Matrix4c<Scalar> unflatten(const Vector16c<Scalar>& vec) {
  Matrix4c<Scalar> out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = vec(4 * r + c);
  return out;
}

/// Index of the flattened diagonal entry rho(k, k).
constexpr int diagonal_index(int k) { return 5 * k; }

/// Stationary state of the generator `l`.
///
/// Solves the system with the rho11 row replaced by the trace functional,
/// then symmetrizes. Throws DegenerateSteadyState when the kernel is not
/// one-dimensional and NoConvergence when the residual exceeds 1e-10.
template <typename Scalar>
DensityMatrix<Scalar> steady_state(const Superoperator<Scalar>& l) {
  using std::abs;
  using C = std::complex<Scalar>;

  Scalar trace_leak = Scalar(0);
  for (int col = 0; col < 16; ++col) {
    C s(0);
    for (int k = 0; k < 4; ++k) s += l(diagonal_index(k), col);
    trace_leak = std::max<Scalar>(trace_leak, abs(s));
  }
  if (trace_leak > Scalar(1e-10) * std::max<Scalar>(Scalar(1), l.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("generator is not trace preserving");
  }

  Eigen::JacobiSVD<Superoperator<Scalar>> svd(l);
  const auto& sv = svd.singularValues();  // descending
  const Scalar smallest = sv(15);
  const Scalar second = sv(14);
  if (!(second > Scalar(1e6) * smallest) || !(second > Scalar(1e-12) * sv(0))) {
    throw DegenerateSteadyState("generator kernel is not one-dimensional (sigma_min = " +
                                std::to_string(static_cast<double>(smallest)) +
                                ", next = " + std::to_string(static_cast<double>(second)) + ")");
  }

  Superoperator<Scalar> augmented = l;
  augmented.row(0).setZero();
  for (int k = 0; k < 4; ++k) augmented(0, diagonal_index(k)) = C(1);
  Vector16c<Scalar> rhs = Vector16c<Scalar>::Zero();
  rhs(0) = C(1);

  const Vector16c<Scalar> solution = augmented.partialPivLu().solve(rhs);
  Matrix4c<Scalar> rho = unflatten<Scalar>(solution);
  rho = (rho + rho.adjoint()).eval() * Scalar(0.5);

  const Scalar residual = (l * flatten<Scalar>(rho)).cwiseAbs().maxCoeff();
  if (!(residual <= Scalar(1e-10))) {
    throw NoConvergence("steady-state residual " + std::to_string(static_cast<double>(residual)) +
                        " exceeds 1e-10");
  }
  return DensityMatrix<Scalar>(rho);
}

/// Populations (rho11, rho22, rho33, rho44), clamped at zero.
template <typename Scalar>
std::array<Scalar, 4> populations(const DensityMatrix<Scalar>& rho) {
  std::array<Scalar, 4> p{};
  for (int k = 0; k < 4; ++k) p[k] = std::max<Scalar>(Scalar(0), rho(k, k).real());
  return p;
}

/// Convenience: steady state of the diamond at loop phase `phi`.
template <typename Scalar>
DensityMatrix<Scalar> diamond_steady_state(Scalar phi, const DriveParams<Scalar>& drives,
                                           const DecayModel<Scalar>& decay,
                                           const std::array<Scalar, 3>& detunings = {}) {
  return steady_state<Scalar>(build_liouvillian<Scalar>(
      build_generator<Scalar>(phi, drives, detunings), decay));
}

}  // namespace looploc
