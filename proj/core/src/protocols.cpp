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

#include "kitnoise/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "kitnoise/parallel.hpp"

namespace kitnoise {

namespace {

void push_single(Schedule& s, int site, double start, double end, double t_f) {
    ScheduleStep step;
    step.duration = t_f;
    step.ramps.push_back(Ramp{RampTarget{RampTarget::Kind::SitePotential, site, -1}, start, end});
    s.add_step(std::move(step));
}

Matrix mode_pair(const EdgeModes& m) {
    Matrix f(m.f_left.size(), 2);
    f.col(0) = m.f_left;
    f.col(1) = m.f_right;
    return f;
}

}  // namespace

Schedule build_transport_schedule(const WireNetwork& network, const std::vector<int>& sites, double t_f, double V) {
    if (!(t_f > 0.0)) throw ParameterError("transport step time must be positive");
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (sites[k] < 0 || sites[k] >= network.size()) {
            throw GeometryError("transport site " + std::to_string(sites[k]) + " does not exist");
        }
        if (k > 0 && network.find_bond(sites[k - 1], sites[k]) < 0) {
            throw GeometryError("transport sites " + std::to_string(sites[k - 1]) + " and " + std::to_string(sites[k]) +
                                " are not adjacent");
        }
    }
    if (!sites.empty() && std::abs(V) < 10.0 * network.energy_scale()) {
        warn("transport push V = " + std::to_string(V) + " is below 10 J; the pushed region may stay topological");
    }
    Schedule s;
    for (int site : sites) push_single(s, site, 0.0, V, t_f);
    return s;
}

std::vector<EdgeModes> track_modes(const DrivenHamiltonian& H, double x, const std::vector<double>& times, double tol) {
    if (times.empty()) return {};
    const MajoranaHamiltonian h0 = H.at(x, times.front());
    const std::optional<EdgeModes> first = zero_modes(h0, tol);
    if (!first) throw StateError("initial Hamiltonian has no Majorana zero modes to track");
    std::vector<EdgeModes> out{*first};
    Matrix prev = mode_pair(*first);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const NormalForm nf = normal_form(H.at(x, times[k]).h);
        const Matrix u = nf.q.leftCols(2);
        const Eigen::JacobiSVD<Matrix> svd(u.transpose() * prev, Eigen::ComputeFullU | Eigen::ComputeFullV);
        prev = u * (svd.matrixU() * svd.matrixV().transpose());
        EdgeModes m;
        m.f_left = prev.col(0);
        m.f_right = prev.col(1);
        m.eps_left = m.eps_right = nf.eps(0);
        out.push_back(std::move(m));
    }
    return out;
}

Observable tracked_edge_observable(std::vector<EdgeModes> modes, std::string name) {
    Observable o;
    o.name = std::move(name);
    o.custom = [modes = std::move(modes)](std::size_t k, double, const Matrix& g) {
        if (k >= modes.size()) throw ParameterError("tracked modes do not cover the output grid");
        return edge_correlation(g, modes[k]);
    };
    return o;
}

std::vector<TransportPoint> transport_fidelity_sweep(const TransportSweep& sweep) {
    std::vector<TransportPoint> out(sweep.t_f.size());
    const ParameterBinding binding = bind_site_potential(sweep.network, sweep.noise_site);
    parallel_for(sweep.t_f.size(), sweep.threads, [&](std::size_t i) {
        const double t_f = sweep.t_f[i];
        const Schedule s = build_transport_schedule(sweep.network, sweep.sites, t_f, sweep.V);
        const DrivenHamiltonian H(sweep.network, binding, s);
        const double total = s.empty() ? t_f : s.total_duration();
        EvolveOptions opt;
        opt.times = uniform_grid(total, std::min(1.0, t_f / 10.0));
        opt.dt = sweep.dt;
        opt.energy_scale = sweep.network.energy_scale();
        opt.check_invariants = false;
        const std::vector<EdgeModes> modes = track_modes(H, 0.0, opt.times);
        const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
        const TimeSeries ts = evolve_marginal(sweep.noise, H, g0, {}, opt);
        out[i] = TransportPoint{t_f, edge_correlation(ts.final_gamma, modes.back())};
    });
    return out;
}

TJunction build_tjunction(int left, int right, int vertical, double J, Complex delta_x, Complex delta_y,
                          double mu_topological, double mu_nontopological) {
    if (left < 0 || right < 0 || vertical < 0) throw GeometryError("T-junction leg lengths must be nonnegative");
    const Complex expected = Complex(0.0, -1.0) * delta_x;
    if (std::abs(delta_y - expected) > 1e-12 * std::max(1.0, std::abs(delta_x))) {
        throw GeometryError("T-junction vertical pairing must equal -i times the horizontal pairing");
    }
    TJunction tj;
    tj.mu_topological = mu_topological;
    tj.mu_nontopological = mu_nontopological;
    WireNetwork& net = tj.network;
    for (int k = 0; k < left; ++k) {
        tj.left.push_back(net.add_site(mu_topological, -(left - k), 0.0, "h" + std::to_string(k + 1)));
    }
    tj.center = net.add_site(mu_topological, 0.0, 0.0, "c");
    for (int k = 0; k < right; ++k) {
        tj.right.push_back(net.add_site(mu_topological, k + 1, 0.0, "h'" + std::to_string(k + 1)));
    }
    for (int k = 0; k < vertical; ++k) {
        tj.vertical.push_back(net.add_site(mu_nontopological, 0.0, -(k + 1), "v" + std::to_string(k + 1)));
    }
    for (int a = 0; a + 1 < net.size() - vertical; ++a) net.add_bond(a, a + 1, J, delta_x);
    int upper = tj.center;
    for (int v : tj.vertical) {
        net.add_bond(v, upper, J, delta_y);
        upper = v;
    }
    return tj;
}

Schedule build_braiding_schedule(const TJunction& junction, double t_f) {
    if (!(t_f > 0.0)) throw ParameterError("braiding step time must be positive");
    const double U = junction.mu_topological - junction.mu_nontopological;
    Schedule s;
    const auto& h = junction.left;
    const auto& hp = junction.right;
    const auto& v = junction.vertical;
    for (int site : h) push_single(s, site, 0.0, U, t_f);
    for (int site : v) push_single(s, site, 0.0, -U, t_f);
    for (auto it = hp.rbegin(); it != hp.rend(); ++it) push_single(s, *it, 0.0, U, t_f);
    for (auto it = h.rbegin(); it != h.rend(); ++it) push_single(s, *it, U, 0.0, t_f);
    for (auto it = v.rbegin(); it != v.rend(); ++it) push_single(s, *it, -U, 0.0, t_f);
    for (int site : hp) push_single(s, site, U, 0.0, t_f);
    s.validate(junction.network);
    return s;
}

BraidResult braid_outcome(const DrivenHamiltonian& H, const Matrix& gamma_final, const EdgeModes& initial) {
    const double T = H.schedule().total_duration();
    const Matrix h0 = H.at(0.0, 0.0).h;
    if ((H.at(0.0, T).h - h0).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h0.cwiseAbs().maxCoeff())) {
        throw StateError("braiding schedule does not return to the initial Hamiltonian");
    }
    BraidResult r;
    r.final_correlation = edge_correlation(gamma_final, initial);
    Matrix f(initial.f_left.size(), 2);
    f << initial.f_left, initial.f_right;
    const Matrix of = propagate(H, 0.0, 0.0, T, f);
    const Vector o1 = of.col(0);
    const Vector o2 = of.col(1);
    r.t11 = initial.f_left.dot(o1);
    r.t12 = initial.f_right.dot(o1);
    r.t21 = initial.f_left.dot(o2);
    r.t22 = initial.f_right.dot(o2);
    r.exchange_signs = r.t12 > 0.5 && r.t21 < -0.5;
    r.double_exchange_signs = r.t11 < -0.5 && r.t22 < -0.5;
    return r;
}

BraidResult run_braid(const TJunction& junction, const BraidRun& run) {
    if (run.exchanges < 0) throw ParameterError("number of exchanges must be nonnegative");
    const Schedule once = build_braiding_schedule(junction, run.t_f);
    Schedule s;
    for (int e = 0; e < run.exchanges; ++e) s = s.then(once);
    const int site = run.noise_site < 0 ? junction.center : run.noise_site;
    const DrivenHamiltonian H(junction.network, bind_site_potential(junction.network, site), s);
    const double total = s.empty() ? run.t_f : s.total_duration();

    EvolveOptions opt;
    opt.times = uniform_grid(total, run.output_step);
    opt.dt = run.dt;
    opt.energy_scale = junction.network.energy_scale();
    const std::vector<EdgeModes> modes = track_modes(H, 0.0, opt.times);
    const std::vector<Observable> obs{tracked_edge_observable(modes, "correlation"),
                                      edge_observable(modes.front(), "correlation_fixed")};
    const Matrix g0 = ground_state_covariance(H.at(0.0, 0.0));
    TimeSeries ts = run.noise ? evolve_marginal(*run.noise, H, g0, obs, opt) : evolve_unitary(H, 0.0, g0, obs, opt);
    BraidResult r = braid_outcome(H, ts.final_gamma, modes.front());
    r.series = std::move(ts);
    return r;
}

std::vector<DropEvent> detect_drops(const std::vector<double>& t, const std::vector<double>& c, double window,
                                    double threshold) {
    if (t.size() != c.size()) throw ParameterError("drop detection needs equally long time and value series");
    if (!(window > 0.0)) throw ParameterError("drop detection window must be positive");
    std::vector<DropEvent> events;
    std::deque<std::size_t> maxima;  // indices with decreasing c inside the window
    std::size_t lo = 0;
    bool inside = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        while (!maxima.empty() && c[maxima.back()] <= c[i]) maxima.pop_back();
        maxima.push_back(i);
        while (t[lo] < t[i] - window) ++lo;
        while (maxima.front() < lo) maxima.pop_front();
        const double d = c[maxima.front()] - c[i];
        if (d > threshold) {
            if (!inside) {
                if (!events.empty() && t[i] - events.back().t_end < window) {
                    inside = true;
                } else {
                    events.push_back(DropEvent{t[i], t[i], d});
                    inside = true;
                }
            }
            events.back().t_end = t[i];
            events.back().depth = std::max(events.back().depth, d);
        } else {
            inside = false;
        }
    }
    return events;
}

ParameterBinding build_split_binding(const WireNetwork& network, int i, int j) {
    ParameterBinding b = bind_bond_scale(network, i, j);
    auto degree = [&](int s) {
        return std::count_if(network.bonds().begin(), network.bonds().end(),
                             [&](const Bond& bond) { return bond.i == s || bond.j == s; });
    };
    if (degree(i) <= 1 || degree(j) <= 1) {
        warn("splitting bond (" + std::to_string(i) + ", " + std::to_string(j) +
             ") touches a wire end; the split is trivial");
    }
    return b;
}

}  // namespace kitnoise
