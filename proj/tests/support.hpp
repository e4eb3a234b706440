#pragma once

// Independent oracles and fixtures shared by the unit tests and the acceptance run.

#include <geofuzz/markov_geometry.hpp>
#include <geofuzz/toylang.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace geofuzz::testing {

    /// Row-stochastic chain on n states: a random Hamiltonian cycle (so irreducible) plus random extra edges.
    inline Eigen::MatrixXd random_irreducible_chain(int n, Rng& rng, double extra_edge_prob = 0.2)
    {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            w(perm[i], perm[(i + 1) % n]) = 0.1 + unit(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && w(i, j) == 0 && unit(rng) < extra_edge_prob)
                    w(i, j) = 0.1 + unit(rng);
        for (int i = 0; i < n; ++i)
            w.row(i) /= w.row(i).sum();
        return w;
    }

    /// Hitting probabilities through the killed walk's Green's function: G = (I - beta P)^-1, h(x,y) = G(x,y)/G(y,y).
    inline Eigen::MatrixXd green_hitting(const Eigen::MatrixXd& p, double beta)
    {
        const Eigen::Index n = p.rows();
        const Eigen::MatrixXd g = (Eigen::MatrixXd::Identity(n, n) - beta * p).inverse();
        Eigen::MatrixXd h(n, n);
        for (Eigen::Index x = 0; x < n; ++x)
            for (Eigen::Index y = 0; y < n; ++y)
                h(x, y) = g(x, y) / g(y, y);
        return h;
    }

    /// Monte-Carlo estimate of h(x,y): fraction of walks from x that reach y, each step surviving with prob beta.
    inline double killed_walk_estimate(const Eigen::MatrixXd& p, double beta, int x, int y, long walks, Rng& rng)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        long hits = 0;
        for (long w = 0; w < walks; ++w) {
            int at = x;
            while (true) {
                if (unit(rng) >= beta)
                    break;
                double u = unit(rng);
                int next = static_cast<int>(p.cols()) - 1;
                for (int j = 0; j < p.cols(); ++j) {
                    u -= p(at, j);
                    if (u < 0) {
                        next = j;
                        break;
                    }
                }
                at = next;
                if (at == y) {
                    ++hits;
                    break;
                }
            }
        }
        return static_cast<double>(hits) / static_cast<double>(walks);
    }

    /// Effective resistance through the Laplacian pseudoinverse of a symmetric weight matrix.
    inline Eigen::MatrixXd pinv_resistance(const Eigen::MatrixXd& w)
    {
        const Eigen::Index n = w.rows();
        const Eigen::MatrixXd lap = Eigen::MatrixXd(w.rowwise().sum().asDiagonal()) - w;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
        Eigen::VectorXd inv = es.eigenvalues();
        for (Eigen::Index i = 0; i < n; ++i)
            inv(i) = std::abs(inv(i)) > 1e-10 ? 1.0 / inv(i) : 0.0;
        const Eigen::MatrixXd lp = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
        Eigen::MatrixXd r(n, n);
        for (Eigen::Index x = 0; x < n; ++x)
            for (Eigen::Index y = 0; y < n; ++y)
                r(x, y) = lp(x, x) + lp(y, y) - 2 * lp(x, y);
        return r;
    }

    /// Random connected undirected graph: a random spanning tree plus extra edges, positive weights.
    inline Eigen::MatrixXd random_connected_graph(int n, Rng& rng, double extra_edge_prob = 0.3)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            std::uniform_int_distribution<int> parent(0, i - 1);
            const int j = parent(rng);
            w(i, j) = w(j, i) = 0.2 + unit(rng);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (w(i, j) == 0 && unit(rng) < extra_edge_prob)
                    w(i, j) = w(j, i) = 0.2 + unit(rng);
        return w;
    }

    /// Exhaustive recursive alignment cost; exponential, only for short sequences.
    /// Costs are summed front to back along each alignment, then minimized.
    inline double brute_force_edit(const Eigen::MatrixXd& d, const std::vector<int>& a, const std::vector<int>& b, double indel)
    {
        double best = std::numeric_limits<double>::infinity();
        std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t i, std::size_t j, double acc) {
            if (i == a.size() && j == b.size()) {
                best = std::min(best, acc);
                return;
            }
            if (i < a.size())
                rec(i + 1, j, acc + indel);
            if (j < b.size())
                rec(i, j + 1, acc + indel);
            if (i < a.size() && j < b.size())
                rec(i + 1, j + 1, acc + d(a[i], b[j]));
        };
        rec(0, 0, 0.0);
        return best;
    }

    /// Calls f on every input in {1..N}^L.
    template <typename F>
    void for_each_input(int length, int alphabet, F&& f)
    {
        InputVec x(static_cast<std::size_t>(length), 1);
        while (true) {
            f(static_cast<const InputVec&>(x));
            int i = 0;
            while (i < length && x[static_cast<std::size_t>(i)] == alphabet)
                x[static_cast<std::size_t>(i++)] = 1;
            if (i == length)
                return;
            ++x[static_cast<std::size_t>(i)];
        }
    }

    /// Fraction of coverable edges reached by executing every input.
    inline double exhaustive_edge_coverage(const Program& program)
    {
        const int n = program.cfg.vertex_count();
        std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
        int covered = 0;
        for_each_input(program.input_length, program.alphabet_size, [&](const InputVec& x) {
            for (const auto& [u, v] : execute(program, x).edge_sequence()) {
                char& c = seen[static_cast<std::size_t>(u) * n + v];
                if (!c) {
                    c = 1;
                    ++covered;
                }
            }
        });
        return static_cast<double>(covered) / program.cfg.coverable_edge_count();
    }

    /// Euclidean distance matrix of 2D points.
    inline Eigen::MatrixXd euclidean(const Eigen::MatrixX2d& pts)
    {
        const Eigen::Index n = pts.rows();
        Eigen::MatrixXd d(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                d(i, j) = (pts.row(i) - pts.row(j)).norm();
        return d;
    }

} // namespace geofuzz::testing
