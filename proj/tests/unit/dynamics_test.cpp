// Copyright 2026 The kitnoise Authors
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

#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "fock_oracle.hpp"
#include "kitnoise/dynamics.hpp"
#include "kitnoise/protocols.hpp"

namespace kitnoise {
namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

// Averaged covariance from the exponential of the full linear generator
// acting on (vec G_0, ..., vec G_{M-1}).
Matrix superoperator_average(const JumpNoise& noise, const DrivenHamiltonian& H, const Matrix& gamma0, double t) {
    const int n = H.dim();
    const int M = noise.size();
    const int block = n * n;
    Matrix big = Matrix::Zero(M * block, M * block);
    const Matrix I = Matrix::Identity(n, n);
    for (int m = 0; m < M; ++m) {
        const Matrix h = H.at(noise.states[m], 0.0).h;
        big.block(m * block, m * block, block, block) = kron(I, h) - kron(h.transpose(), I);
        for (int k = 0; k < M; ++k) {
            big.block(m * block, k * block, block, block) += noise.generator(m, k) * Matrix::Identity(block, block);
        }
    }
    const Vector p0 = initial_distribution(noise);
    Vector v(M * block);
    for (int m = 0; m < M; ++m) v.segment(m * block, block) = p0[m] * Eigen::Map<const Vector>(gamma0.data(), block);
    const Vector out = (big * t).exp() * v;
    Matrix avg = Matrix::Zero(n, n);
    for (int m = 0; m < M; ++m) avg += Eigen::Map<const Matrix>(out.data() + m * block, n, n);
    return avg;
}

EvolveOptions grid(double t_max, double step) {
    EvolveOptions o;
    o.times = uniform_grid(t_max, step);
    return o;
}

WireNetwork chain(int n, double delta, double mu) { return WireNetwork::chain(n, 1.0, Complex(delta, 0.0), mu); }

TEST(Unitary, MatchesFockSpaceQuench) {
    const WireNetwork before = chain(3, 0.6, 0.4);
    WireNetwork after = chain(3, 0.6, 1.5);
    after.set_bond(1, 0.7, Complex(0.3, 0.4));
    const testing::FockSpace fock(3);
    Eigen::SelfAdjointEigenSolver<testing::CMatrix> es(fock.hamiltonian(before));
    const testing::CVector psi0 = es.eigenvectors().col(0);

    // Noise value x shifts every mu by x; the Fock reference uses the shifted network.
    const double x = 0.35;
    WireNetwork shifted = after;
    for (int j = 0; j < 3; ++j) shifted.set_mu(j, after.sites()[j].mu + x);
    const double t = 1.7;
    const Matrix ref = fock.covariance(testing::evolve(fock.hamiltonian(shifted), psi0, t));

    const DrivenHamiltonian H(after, bind_global_mu(after));
    const TimeSeries ts = evolve_unitary(H, x, fock.covariance(psi0), {}, grid(t, t / 10));
    EXPECT_LT((ts.final_gamma - ref).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Unitary, MatchesMatrixExponential) {
    const WireNetwork net = chain(8, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(build_hamiltonian(chain(8, 0.8, 1.4)));
    const double t = 3.0;
    const Matrix h = H.at(0.0, 0.0).h;
    const Matrix ref = (h * t).exp() * g0 * (-h * t).exp();
    const TimeSeries ts = evolve_unitary(H, 0.0, g0, {}, grid(t, 0.5));
    EXPECT_LT((ts.final_gamma - ref).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(ts.invariants.max_purity_defect, 1e-10);
    EXPECT_LT(ts.invariants.max_antisymmetry, 1e-12);
}

TEST(Unitary, GroundStateIsStationary) {
    const WireNetwork net = chain(20, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const MajoranaHamiltonian h0 = H.at(0.0, 0.0);
    const auto modes = zero_modes(h0);
    ASSERT_TRUE(modes);
    const TimeSeries ts = evolve_unitary(H, 0.0, ground_state_covariance(h0), {edge_observable(*modes)}, grid(50.0, 1.0));
    for (double v : ts.column("edge")) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(Marginal, MatchesSuperoperatorExponential) {
    const WireNetwork net = chain(2, 0.7, 0.3);
    const Matrix g0 = ground_state_covariance(build_hamiltonian(net));
    const double t = 3.0;
    struct Case {
        JumpNoise noise;
        ParameterBinding binding;
    };
    JumpNoise stationary = discretized_gaussian(0.1, 0.5, 0.8, 3);
    stationary.stationary_start = true;
    const std::vector<Case> cases = {
        {telegraph(0.0, 0.8, 0.7), bind_global_mu(net)},
        {stationary, bind_site_mu(net, 1)},
        {telegraph(0.0, -1.0, 2.0), bind_bond_scale(net, 0, 1)},
    };
    for (const Case& c : cases) {
        const DrivenHamiltonian H(net, c.binding);
        const TimeSeries ts = evolve_marginal(c.noise, H, g0, {}, grid(t, 0.25));
        EXPECT_LT((ts.final_gamma - superoperator_average(c.noise, H, g0, t)).cwiseAbs().maxCoeff(), 1e-9)
            << c.binding.describe();
        EXPECT_LT(ts.invariants.max_probability_error, 1e-12);
        EXPECT_LT(ts.invariants.max_chapman_error, 1e-8);
        EXPECT_LE(ts.invariants.max_singular, 1.0 + 1e-8);
    }
}

TEST(Marginal, ZeroAmplitudeNoiseIsNoiseFree) {
    const WireNetwork net = chain(10, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(build_hamiltonian(chain(10, 0.8, 1.0)));
    const TimeSeries a = evolve_marginal(telegraph(0.3, 0.3, 1.0), H, g0, {}, grid(5.0, 0.5));
    const TimeSeries b = evolve_unitary(H, 0.3, g0, {}, grid(5.0, 0.5));
    // Exact rotation against RK4 at the automatic step.
    EXPECT_LT((a.final_gamma - b.final_gamma).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Marginal, IsLinearInTheInitialCovariance) {
    const WireNetwork net = chain(6, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const JumpNoise noise = telegraph(0.0, 0.8, 0.7);
    const Matrix ga = ground_state_covariance(build_hamiltonian(chain(6, 0.8, 0.5)));
    const Matrix gb = ground_state_covariance(build_hamiltonian(chain(6, 0.3, 2.5)));
    const auto run = [&](const Matrix& g) { return evolve_marginal(noise, H, g, {}, grid(2.0, 0.5)).final_gamma; };
    EXPECT_LT((run(0.3 * ga + 0.7 * gb) - (0.3 * run(ga) + 0.7 * run(gb))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Marginal, ConvergenceCheckAndSnapshots) {
    const WireNetwork net = chain(12, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0), GroundStateOptions{std::nullopt, false, 1e-2});
    EvolveOptions o = grid(4.0, 0.5);
    o.convergence_check = true;
    o.snapshot_times = {1.0, 3.0};
    const auto modes = zero_modes(H.at(0.0, 0.0), 1e-2);
    ASSERT_TRUE(modes);
    const TimeSeries ts = evolve_marginal(telegraph(0.0, 0.8, 0.7), H, g0, {edge_observable(*modes)}, o);
    EXPECT_GE(ts.convergence_delta, 0.0);
    EXPECT_LT(ts.convergence_delta, 1e-6);
    ASSERT_EQ(ts.snapshots.size(), 2u);
    EXPECT_DOUBLE_EQ(ts.snapshots[1].first, 3.0);
}

TEST(Marginal, IdealChainEdgeIsImmuneToBulkNoise) {
    const int n = 16;
    const WireNetwork net = WireNetwork::chain(n, 1.0, Complex(1.0, 0.0), 0.0);
    const Matrix g0 = ground_state_covariance(build_hamiltonian(net));
    for (int d : {2, 8, n - 1}) {
        const DrivenHamiltonian H(net, bind_site_mu(net, d - 1));
        const TimeSeries ts = evolve_marginal(telegraph(0.0, 0.8, 0.7), H, g0, {entry_observable(0, 2 * n - 1)}, grid(20.0, 0.5));
        for (double v : ts.values[0]) EXPECT_NEAR(v, g0(0, 2 * n - 1), 1e-10) << "d = " << d;
    }
}

TEST(Marginal, RejectsBadInput) {
    const WireNetwork net = chain(4, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
    EvolveOptions o;
    o.times = {0.0, 1.0, 1.0};
    EXPECT_THROW(evolve_marginal(telegraph(0.0, 1.0, 1.0), H, g0, {}, o), ParameterError);
    EXPECT_THROW(evolve_marginal(telegraph(0.0, 1.0, 1.0), H, Matrix::Zero(4, 4), {}, grid(1.0, 0.5)), ParameterError);
}

TEST(Trajectory, AgreesWithMarginalWithinStandardErrors) {
    const WireNetwork net = chain(6, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const MajoranaHamiltonian h0 = H.at(0.0, 0.0);
    const Matrix g0 = ground_state_covariance(h0, GroundStateOptions{std::nullopt, false, 1e-2});
    const auto modes = zero_modes(h0, 1e-2);
    ASSERT_TRUE(modes);
    const std::vector<Observable> obs{edge_observable(*modes)};
    const JumpNoise noise = telegraph(0.0, 0.8, 0.7);
    const EvolveOptions o = grid(6.0, 0.5);
    const TimeSeries exact = evolve_marginal(noise, H, g0, obs, o);
    TrajectoryOptions tr;
    tr.n_traj = 3000;
    tr.seed = 5;
    const TimeSeries mc = evolve_trajectory_average(noise, H, g0, obs, o, tr);
    for (std::size_t k = 1; k < o.times.size(); ++k) {
        EXPECT_LT(std::abs(mc.values[0][k] - exact.values[0][k]), 4.0 * mc.standard_errors[0][k] + 1e-12) << o.times[k];
    }
    EXPECT_GT(mc.invariants.parity_checked, 0);
    EXPECT_EQ(mc.invariants.parity_violations, 0);
}

TEST(Trajectory, DrivenHamiltonianAgreesWithMarginal) {
    const WireNetwork net = chain(6, 0.8, 0.2);
    const Schedule s = build_transport_schedule(net, {0, 1}, 2.0, 20.0);
    const DrivenHamiltonian H(net, bind_site_potential(net, 1), s);
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
    const std::vector<Observable> obs{entry_observable(0, 11)};
    const JumpNoise noise = telegraph(0.0, 0.8, 1.0);
    const EvolveOptions o = grid(4.0, 0.5);
    const TimeSeries exact = evolve_marginal(noise, H, g0, obs, o);
    TrajectoryOptions tr;
    tr.n_traj = 600;
    tr.seed = 2;
    const TimeSeries mc = evolve_trajectory_average(noise, H, g0, obs, o, tr);
    for (std::size_t k = 1; k < o.times.size(); ++k) {
        EXPECT_LT(std::abs(mc.values[0][k] - exact.values[0][k]), 4.0 * mc.standard_errors[0][k] + 1e-9) << o.times[k];
    }
    EXPECT_EQ(mc.invariants.parity_violations, 0);
}

TEST(Trajectory, ResultIsIndependentOfThreadCount) {
    const WireNetwork net = chain(8, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
    const std::vector<Observable> obs{entry_observable(0, 15), energy_observable(H.at(0.0, 0.0))};
    TrajectoryOptions a;
    a.n_traj = 150;
    a.threads = 1;
    TrajectoryOptions b = a;
    b.threads = 3;
    const JumpNoise noise = discretized_gaussian(0.2, 0.5, 1.0, 4);
    const TimeSeries ra = evolve_trajectory_average(noise, H, g0, obs, grid(3.0, 0.5), a);
    const TimeSeries rb = evolve_trajectory_average(noise, H, g0, obs, grid(3.0, 0.5), b);
    EXPECT_EQ(ra.values, rb.values);
    EXPECT_EQ(ra.standard_errors, rb.standard_errors);
}

TEST(Limits, LindbladWithoutDampingIsUnitary) {
    const WireNetwork net = chain(8, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(build_hamiltonian(chain(8, 0.8, 1.0)));
    FastLimitSpec spec{H, 0.4, 0.0};
    const TimeSeries a = evolve_lindblad_fast(spec, g0, {}, grid(3.0, 0.5));
    const TimeSeries b = evolve_unitary(H, 0.4, g0, {}, grid(3.0, 0.5));
    EXPECT_LT((a.final_gamma - b.final_gamma).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT(a.invariants.max_purity_defect, 1e-6);
}

TEST(Limits, FastNoiseApproachesLindblad) {
    const WireNetwork net = chain(8, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const MajoranaHamiltonian h0 = H.at(0.0, 0.0);
    const Matrix g0 = ground_state_covariance(h0);
    const auto modes = zero_modes(h0, 1e-2);
    ASSERT_TRUE(modes);
    const std::vector<Observable> obs{edge_observable(*modes)};
    const JumpNoise noise = telegraph(0.0, 0.8, 200.0);
    const FastLimitSpec spec = fast_limit_spec(noise, H);
    EXPECT_NEAR(spec.rate, 0.16 / 400.0, 1e-15);
    EXPECT_NEAR(spec.mean, 0.4, 1e-14);
    const TimeSeries a = evolve_marginal(noise, H, g0, obs, grid(10.0, 0.5));
    const TimeSeries b = evolve_lindblad_fast(spec, g0, obs, grid(10.0, 0.5));
    for (std::size_t k = 0; k < a.t.size(); ++k) EXPECT_NEAR(a.values[0][k], b.values[0][k], 5e-3) << a.t[k];
}

TEST(Limits, SlowNoiseApproachesQuasiStatic) {
    const WireNetwork net = chain(10, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
    JumpNoise noise = telegraph(0.0, 0.8, 1e-3);
    noise.stationary_start = true;
    const TimeSeries a = evolve_marginal(noise, H, g0, {}, grid(10.0, 1.0));
    const TimeSeries b = evolve_quasi_static(noise, H, g0, {}, grid(10.0, 1.0));
    EXPECT_LT((a.final_gamma - b.final_gamma).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(Propagator, IsOrthogonalAndMatchesExponential) {
    const WireNetwork net = chain(6, 0.8, 0.2);
    const DrivenHamiltonian H(net, bind_global_mu(net));
    const Matrix O = propagator(H, 0.5, 0.0, 2.0);
    EXPECT_LT((O * O.transpose() - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((O - (H.at(0.5, 0.0).h * 2.0).exp()).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix v = Matrix::Identity(12, 2);
    EXPECT_LT((propagate(H, 0.5, 0.0, 2.0, v) - O * v).cwiseAbs().maxCoeff(), 1e-10);

    const Schedule s = build_transport_schedule(net, {0, 1}, 1.0, 5.0);
    const DrivenHamiltonian D(net, bind_global_mu(net), s);
    const Matrix Od = propagator(D, 0.0, 0.0, 2.0, 1e-3);
    EXPECT_LT((Od * Od.transpose() - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((propagate(D, 0.0, 0.0, 2.0, v, 1e-3) - Od * v).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Bindings, ShiftTheIntendedParameter) {
    const WireNetwork net = chain(4, 0.8, 0.2);
    WireNetwork shifted = net;
    shifted.set_mu(2, 0.2 + 0.5);
    const DrivenHamiltonian site(net, bind_site_mu(net, 2));
    EXPECT_LT((site.at(0.5, 0.0).h - build_hamiltonian(shifted).h).cwiseAbs().maxCoeff(), 1e-15);
    const DrivenHamiltonian pot(net, bind_site_potential(net, 2));
    EXPECT_LT((pot.at(-0.5, 0.0).h - build_hamiltonian(shifted).h).cwiseAbs().maxCoeff(), 1e-15);

    WireNetwork cut = net;
    cut.set_bond(1, 0.0, Complex(0.0, 0.0));
    const DrivenHamiltonian bond(net, bind_bond_scale(net, 1, 2));
    EXPECT_LT((bond.at(-1.0, 0.0).h - build_hamiltonian(cut).h).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
}  // namespace kitnoise
