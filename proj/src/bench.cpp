// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/bench.hpp"

#include "qbmor/kron.hpp"

#include <cmath>

namespace qbmor {

namespace {

constexpr double kPi = 3.14159265358979323846;

// u(t) = a sin(λt) or a cos(λt) as a two-state rotation generator.
SignalGenerator oscillator(double amplitude, double lambda, bool cosine) {
    SignalGenerator g;
    std::vector<Triplet> az{{0, 1, lambda}, {1, 0, -lambda}};
    g.Az.resize(2, 2);
    g.Az.setFromTriplets(az.begin(), az.end());
    g.Gz = QuadMap(2, 2, 2);
    std::vector<Triplet> cz{{0, 0, 1.0}};
    g.Cz.resize(1, 2);
    g.Cz.setFromTriplets(cz.begin(), cz.end());
    g.z0.resize(2);
    if (cosine)
        g.z0 << amplitude, 0.0;
    else
        g.z0 << 0.0, amplitude;
    return g;
}

SignalGenerator scaled(SignalGenerator g, double alpha) {
    g.z0 *= alpha;
    return g;
}

}  // namespace

QBSystem burgers(Index N, double nu, BurgersForm form) {
    if (N < 4 || nu <= 0)
        throw std::invalid_argument("burgers: need N >= 4 and nu > 0");
    const double h = 1.0 / double(N + 2);
    const double d = nu / (h * h);
    QBSystem S;
    S.E = speye(N);
    std::vector<Triplet> a, b;
    std::vector<QuadEntry> g, dmap, gu;
    for (Index i = 0; i < N; ++i) {
        // diffusion stencil; Neumann elimination v_{N+1} = v_N in the last row
        a.emplace_back(i, i, i + 1 == N ? -d : -2 * d);
        if (i > 0)
            a.emplace_back(i, i - 1, d);
        if (i + 1 < N)
            a.emplace_back(i, i + 1, d);
    }
    b.emplace_back(0, 0, d);  // v_0 = u enters the node-1 diffusion stencil

    if (form == BurgersForm::advective) {
        // -v_i (v_{i+1} - v_{i-1}) / (2h)
        const double c = 1.0 / (2.0 * h);
        for (Index i = 0; i < N; ++i) {
            if (i + 1 < N)
                g.push_back({i, i, i + 1, -c});
            else
                g.push_back({i, i, i, -c});  // v_{N+1} = v_N
            if (i > 0)
                g.push_back({i, i, i - 1, c});
            else
                dmap.push_back({0, 0, 0, c});  // v_0 = u: bilinear v_1·u
        }
    } else {
        // -(v_{i+1}^2 - v_{i-1}^2) / (4h)
        const double c = 1.0 / (4.0 * h);
        for (Index i = 0; i < N; ++i) {
            if (i + 1 < N)
                g.push_back({i, i + 1, i + 1, -c});
            else
                g.push_back({i, i, i, -c});  // v_{N+1} = v_N
            if (i > 0)
                g.push_back({i, i - 1, i - 1, c});
            else
                gu.push_back({0, 0, 0, c});  // v_0² = u²: quadratic input
        }
    }
    S.A.resize(N, N);
    S.A.setFromTriplets(a.begin(), a.end());
    S.B.resize(N, 1);
    S.B.setFromTriplets(b.begin(), b.end());
    S.G = QuadMap::from_entries(N, N, N, std::move(g));
    S.D = QuadMap::from_entries(N, N, 1, std::move(dmap));
    S.Gu = QuadMap::from_entries(N, 1, 1, std::move(gu));
    S.Bp.resize(N, 1);
    std::vector<Triplet> c{{0, int(N - 1), 1.0}};
    S.C.resize(1, N);
    S.C.setFromTriplets(c.begin(), c.end());
    S.x0 = Vector::Zero(N);
    return S;
}

SignalGenerator burgers_case_generator(int input_case) {
    if (input_case == 1) {
        // 0.5 (cos 1.3πt - cos 5.4πt - sin 0.6πt + 1.2 sin 3.1πt)
        return superpose_generators({oscillator(0.5, 1.3 * kPi, true),
                                     oscillator(-0.5, 5.4 * kPi, true),
                                     oscillator(-0.5, 0.6 * kPi, false),
                                     oscillator(0.6, 3.1 * kPi, false)});
    }
    if (input_case == 2) {
        // 1/(0.5 - e^{2t}) + 2 e^{-t}
        SignalGenerator g;
        std::vector<Triplet> az{{0, 0, -2.0}, {1, 1, -1.0}};
        g.Az.resize(2, 2);
        g.Az.setFromTriplets(az.begin(), az.end());
        g.Gz = QuadMap::from_entries(2, 2, 2, {{0, 0, 0, -0.5}});
        std::vector<Triplet> cz{{0, 0, -0.5}, {0, 1, 2.0}};
        g.Cz.resize(1, 2);
        g.Cz.setFromTriplets(cz.begin(), cz.end());
        g.z0.resize(2);
        g.z0 << 4.0, 1.0;
        return g;
    }
    throw std::invalid_argument("burgers_case_generator: case must be 1 or 2");
}

QBSystem chafee(Index Ntilde) {
    if (Ntilde < 4)
        throw std::invalid_argument("chafee: need Ntilde >= 4");
    const Index n = Ntilde;
    const Index N = 2 * n;  // state [v_1..v_n; w_1..w_n]
    const double h = 1.0 / double(n + 2);
    const double d = 1.0 / (h * h);
    QBSystem S;
    S.E = speye(N);
    std::vector<Triplet> a, b;
    std::vector<QuadEntry> g, dmap;
    for (Index i = 0; i < n; ++i) {
        // v̇_i = -v_i w_i + ∂ξξ v + v_i
        a.emplace_back(i, i, (i + 1 == n ? -d : -2 * d) + 1.0);
        if (i > 0)
            a.emplace_back(i, i - 1, d);
        if (i + 1 < n)
            a.emplace_back(i, i + 1, d);
        g.push_back({i, i, n + i, -1.0});
        // ẇ_i = -2 w_i² + 2 v_i ∂ξξ v + 2 v_i²
        const Index r = n + i;
        g.push_back({r, n + i, n + i, -2.0});
        g.push_back({r, i, i, 2.0});
        g.push_back({r, i, i, i + 1 == n ? -2 * d : -4 * d});
        if (i > 0)
            g.push_back({r, i, i - 1, 2 * d});
        if (i + 1 < n)
            g.push_back({r, i, i + 1, 2 * d});
    }
    b.emplace_back(0, 0, d);        // v_0 = u in the v-equation
    dmap.push_back({n, 0, 0, 2 * d});  // 2 v_1 u / h² in the w-equation
    S.A.resize(N, N);
    S.A.setFromTriplets(a.begin(), a.end());
    S.B.resize(N, 1);
    S.B.setFromTriplets(b.begin(), b.end());
    S.G = QuadMap::from_entries(N, N, N, std::move(g));
    S.D = QuadMap::from_entries(N, N, 1, std::move(dmap));
    S.Gu = QuadMap(N, 1, 1);
    S.Bp.resize(N, 1);
    std::vector<Triplet> c{{0, int(n - 1), 1.0}};
    S.C.resize(1, N);
    S.C.setFromTriplets(c.begin(), c.end());
    S.x0 = Vector::Zero(N);
    return S;
}

SignalGenerator chafee_case_generator(int input_case) {
    if (input_case == 1)
        return burgers_case_generator(1);
    if (input_case == 2)
        return scaled(burgers_case_generator(1), 0.125);
    throw std::invalid_argument("chafee_case_generator: case must be 1 or 2");
}

QBSystem rc_ladder(Index Ntilde, DiodeLaw law) {
    if (Ntilde < 3)
        throw std::invalid_argument("rc_ladder: need Ntilde >= 3");
    const Index n = Ntilde;
    const Index N = 2 * n;  // [x_1..x_n; g(x_1)..g(x_n)]
    QBSystem S;
    S.E = speye(N);

    // Voltage-difference rows: linear coefficients on x and the auxiliary
    // states, plus the source term in rows 1 and 2.
    // row 0: ẋ_1 = -x_1 - x_2 - G_1 - G_2 + u
    // row 1: ẋ_2 = -x_1 - 2x_2 + x_3 - G_1 - 2G_2 + G_3 + u
    // rows 2..n-2: ẋ_i = x_{i-1} - 2x_i + x_{i+1} + G_{i-1} - 2G_i + G_{i+1}
    // row n-1: ẋ_n = x_{n-1} - 2x_n + G_{n-1} - 2G_n
    std::vector<std::vector<std::pair<Index, double>>> lin(n);
    std::vector<double> uin(n, 0.0);
    lin[0] = {{0, -1.0}, {1, -1.0}, {n + 0, -1.0}, {n + 1, -1.0}};
    uin[0] = 1.0;
    lin[1] = {{0, -1.0}, {1, -2.0}, {n + 0, -1.0}, {n + 1, -2.0}};
    if (n > 2) {
        lin[1].push_back({2, 1.0});
        lin[1].push_back({n + 2, 1.0});
    }
    uin[1] = 1.0;
    for (Index i = 2; i < n - 1; ++i)
        lin[i] = {{i - 1, 1.0}, {i, -2.0}, {i + 1, 1.0},
                  {n + i - 1, 1.0}, {n + i, -2.0}, {n + i + 1, 1.0}};
    if (n > 2)
        lin[n - 1] = {{n - 2, 1.0}, {n - 1, -2.0}, {n + n - 2, 1.0}, {n + n - 1, -2.0}};

    std::vector<Triplet> a, b;
    std::vector<QuadEntry> g, dmap;
    for (Index i = 0; i < n; ++i) {
        for (auto [j, v] : lin[i])
            a.emplace_back(i, j, v);
        if (uin[i] != 0.0)
            b.emplace_back(i, 0, uin[i]);
    }
    // Auxiliary rows: d/dt g(x_i) = 40 e^{40 x_i} ẋ_i. With the shifted law
    // e^{40x} = G_i + 1 so the chain rule splits into a quadratic and a linear
    // copy of ẋ_i; the printed law keeps only the quadratic copy.
    for (Index i = 0; i < n; ++i) {
        const Index r = n + i;
        for (auto [j, v] : lin[i]) {
            g.push_back({r, n + i, j, 40.0 * v});
            if (law == DiodeLaw::shifted)
                a.emplace_back(r, j, 40.0 * v);
        }
        if (uin[i] != 0.0) {
            dmap.push_back({r, n + i, 0, 40.0 * uin[i]});
            if (law == DiodeLaw::shifted)
                b.emplace_back(r, 0, 40.0 * uin[i]);
        }
    }
    S.A.resize(N, N);
    S.A.setFromTriplets(a.begin(), a.end());
    S.B.resize(N, 1);
    S.B.setFromTriplets(b.begin(), b.end());
    S.G = QuadMap::from_entries(N, N, N, std::move(g));
    S.D = QuadMap::from_entries(N, N, 1, std::move(dmap));
    S.Gu = QuadMap(N, 1, 1);
    S.Bp.resize(N, 1);
    std::vector<Triplet> c{{0, 0, 1.0}};
    S.C.resize(1, N);
    S.C.setFromTriplets(c.begin(), c.end());
    S.x0 = Vector::Zero(N);
    if (law == DiodeLaw::printed)
        for (Index i = 0; i < n; ++i)
            S.x0[n + i] = std::exp(-1.0);  // g(0) under the printed law
    return S;
}

SignalGenerator rc_case_generator(int input_case) {
    if (input_case == 1) {
        // u = e^{-t}: u = z, ż = -z, z(0) = 1
        SignalGenerator g;
        std::vector<Triplet> az{{0, 0, -1.0}};
        g.Az.resize(1, 1);
        g.Az.setFromTriplets(az.begin(), az.end());
        g.Gz = QuadMap(1, 1, 1);
        std::vector<Triplet> cz{{0, 0, 1.0}};
        g.Cz.resize(1, 1);
        g.Cz.setFromTriplets(cz.begin(), cz.end());
        g.z0 = Vector::Ones(1);
        return g;
    }
    if (input_case == 2) {
        // u = 1 + cos(10πt): constant mode plus rotation, u = [1 0 1] z
        SignalGenerator g;
        std::vector<Triplet> az{{1, 2, 10 * kPi}, {2, 1, -10 * kPi}};
        g.Az.resize(3, 3);
        g.Az.setFromTriplets(az.begin(), az.end());
        g.Gz = QuadMap(3, 3, 3);
        std::vector<Triplet> cz{{0, 0, 1.0}, {0, 2, 1.0}};
        g.Cz.resize(1, 3);
        g.Cz.setFromTriplets(cz.begin(), cz.end());
        g.z0.resize(3);
        g.z0 << 1.0, 0.0, 1.0;
        return g;
    }
    throw std::invalid_argument("rc_case_generator: case must be 1 or 2");
}

QBSystem build_benchmark(const BenchmarkSpec& spec) {
    if (spec.name == "burgers_adv")
        return burgers(spec.size, spec.nu, BurgersForm::advective);
    if (spec.name == "burgers_cons")
        return burgers(spec.size, spec.nu, BurgersForm::conservative);
    if (spec.name == "chafee")
        return chafee(spec.size);
    if (spec.name == "rc_ladder")
        return rc_ladder(spec.size, spec.diode_law);
    throw std::invalid_argument("build_benchmark: unknown benchmark '" + spec.name + "'");
}

SignalGenerator benchmark_generator(const BenchmarkSpec& spec) {
    if (spec.name == "burgers_adv" || spec.name == "burgers_cons")
        return burgers_case_generator(spec.input_case);
    if (spec.name == "chafee")
        return chafee_case_generator(spec.input_case);
    if (spec.name == "rc_ladder")
        return rc_case_generator(spec.input_case);
    throw std::invalid_argument("benchmark_generator: unknown benchmark '" + spec.name + "'");
}

}  // namespace qbmor
