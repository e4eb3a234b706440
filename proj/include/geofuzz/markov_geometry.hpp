#pragma once

#include <geofuzz/error.hpp>
#include <geofuzz/toylang.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

namespace geofuzz {

    template <typename Scalar>
    using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    template <typename Scalar>
    using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// Row-stochastic transition matrix on CFG vertices.
    template <typename Scalar = double>
    struct MarkovChain {
        MatrixX<Scalar> transition;
        Scalar smoothing = Scalar(0);

        Eigen::Index size() const { return transition.rows(); }
    };

    enum class MetricKind { HittingProbability, CommuteTime, Resistance };

    inline const char* to_string(MetricKind kind)
    {
        switch (kind) {
        case MetricKind::HittingProbability:
            return "hitprob";
        case MetricKind::CommuteTime:
            return "commute";
        case MetricKind::Resistance:
            return "resistance";
        }
        return "?";
    }

    /// Symmetric vertex dissimilarity with a zero diagonal.
    template <typename Scalar = double>
    struct MetricMatrix {
        MatrixX<Scalar> distances;
        MetricKind kind = MetricKind::HittingProbability;
        Scalar beta = Scalar(0); // hitting-probability only
        bool underflow_clamped = false;
        Scalar max_finite_distance = Scalar(0);

        Eigen::Index size() const { return distances.rows(); }
        Scalar operator()(Eigen::Index i, Eigen::Index j) const { return distances(i, j); }
    };

    /// P(u,v) = (count(u,v) + eps*A(u,v)) / sum_w (count(u,w) + eps*A(u,w)).
    template <typename DerivedCounts, typename DerivedAdjacency>
    MarkovChain<typename DerivedCounts::Scalar> estimate_chain(const Eigen::MatrixBase<DerivedCounts>& counts,
        const Eigen::MatrixBase<DerivedAdjacency>& adjacency, typename DerivedCounts::Scalar eps)
    {
        using Scalar = typename DerivedCounts::Scalar;
        const Eigen::Index n = adjacency.rows();
        if (adjacency.cols() != n || counts.rows() != n || counts.cols() != n)
            throw StructuralError("estimate_chain: counts and adjacency must be square and of equal size");
        if (!(eps > Scalar(0)))
            throw ParameterError("estimate_chain: smoothing weight must be positive");

        MarkovChain<Scalar> chain;
        chain.smoothing = eps;
        chain.transition = MatrixX<Scalar>::Zero(n, n);
        for (Eigen::Index u = 0; u < n; ++u) {
            Scalar total(0);
            bool has_successor = false;
            for (Eigen::Index v = 0; v < n; ++v) {
                const Scalar a = static_cast<Scalar>(adjacency(u, v));
                const Scalar c = counts(u, v);
                if (c < Scalar(0))
                    throw StructuralError("estimate_chain: negative edge count");
                if (a == Scalar(0)) {
                    if (c != Scalar(0))
                        throw StructuralError("estimate_chain: count on a non-edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
                    continue;
                }
                has_successor = true;
                chain.transition(u, v) = c + eps * a;
                total += chain.transition(u, v);
            }
            if (!has_successor)
                throw StructuralError("estimate_chain: vertex " + std::to_string(u) + " has no successors");
            chain.transition.row(u) /= total;
        }
        return chain;
    }

    /// h(x,y): probability that a walk from x, surviving each step with probability beta, reaches y.
    /// One (n-1)-dimensional solve per target; h(y,y) = 1.
    template <typename Scalar>
    MatrixX<Scalar> hitting_probabilities(const MarkovChain<Scalar>& chain, Scalar beta)
    {
        if (!(beta > Scalar(0) && beta < Scalar(1)))
            throw ParameterError("hitting_probabilities: beta must lie in (0,1)");
        const Eigen::Index n = chain.size();
        const MatrixX<Scalar>& p = chain.transition;
        MatrixX<Scalar> h = MatrixX<Scalar>::Identity(n, n);
        if (n < 2)
            return h;

        std::vector<Eigen::Index> others(static_cast<std::size_t>(n - 1));
        for (Eigen::Index y = 0; y < n; ++y) {
            std::iota(others.begin(), others.begin() + y, Eigen::Index(0));
            std::iota(others.begin() + y, others.end(), y + 1);

            MatrixX<Scalar> system = MatrixX<Scalar>::Identity(n - 1, n - 1) - beta * p(others, others);
            VectorX<Scalar> rhs = beta * p(others, y);
            Eigen::PartialPivLU<MatrixX<Scalar>> lu(system);
            VectorX<Scalar> col = lu.solve(rhs);
            if (!col.allFinite())
                throw NumericalError("hitting_probabilities: singular system for target " + std::to_string(y) + " (chain of size " + std::to_string(n)
                    + ", beta " + std::to_string(static_cast<double>(beta)) + ")");
            h(others, y) = col;
        }
        return h;
    }

    /// d(x,y) = -log(h(x,y) h(y,x)).
    template <typename Scalar>
    MetricMatrix<Scalar> hitting_prob_metric(const MarkovChain<Scalar>& chain, Scalar beta)
    {
        constexpr Scalar floor = Scalar(1e-300);
        const MatrixX<Scalar> h = hitting_probabilities(chain, beta);
        const Eigen::Index n = chain.size();

        MetricMatrix<Scalar> metric;
        metric.kind = MetricKind::HittingProbability;
        metric.beta = beta;
        metric.distances = MatrixX<Scalar>::Zero(n, n);
        for (Eigen::Index x = 0; x < n; ++x) {
            for (Eigen::Index y = x + 1; y < n; ++y) {
                Scalar hxy = h(x, y), hyx = h(y, x);
                if (hxy < floor || hyx < floor) {
                    metric.underflow_clamped = true;
                    hxy = std::max(hxy, floor);
                    hyx = std::max(hyx, floor);
                }
                const Scalar d = -std::log(hxy * hyx);
                metric.distances(x, y) = metric.distances(y, x) = d;
                metric.max_finite_distance = std::max(metric.max_finite_distance, d);
            }
        }
        return metric;
    }

    /// Stationary distribution of an irreducible chain.
    template <typename Scalar>
    VectorX<Scalar> stationary_distribution(const MarkovChain<Scalar>& chain)
    {
        const Eigen::Index n = chain.size();
        MatrixX<Scalar> system = (MatrixX<Scalar>::Identity(n, n) - chain.transition).transpose();
        system.row(n - 1).setOnes();
        VectorX<Scalar> rhs = VectorX<Scalar>::Zero(n);
        rhs(n - 1) = Scalar(1);
        VectorX<Scalar> pi = system.partialPivLu().solve(rhs);
        if (!pi.allFinite())
            throw NumericalError("stationary_distribution: solve failed");
        return pi;
    }

    /// C(x,y) = E_x[T_y] + E_y[T_x] via the fundamental matrix (I - P + 1 pi^T)^-1.
    template <typename Scalar>
    MetricMatrix<Scalar> commute_time_metric(const MarkovChain<Scalar>& chain)
    {
        const Eigen::Index n = chain.size();
        const VectorX<Scalar> pi = stationary_distribution(chain);
        MatrixX<Scalar> fundamental = MatrixX<Scalar>::Identity(n, n) - chain.transition + VectorX<Scalar>::Ones(n) * pi.transpose();
        fundamental = fundamental.partialPivLu().inverse().eval();
        if (!fundamental.allFinite())
            throw NumericalError("commute_time_metric: fundamental matrix is singular");

        MetricMatrix<Scalar> metric;
        metric.kind = MetricKind::CommuteTime;
        metric.distances = MatrixX<Scalar>::Zero(n, n);
        for (Eigen::Index x = 0; x < n; ++x) {
            for (Eigen::Index y = x + 1; y < n; ++y) {
                const Scalar to_y = (fundamental(y, y) - fundamental(x, y)) / pi(y);
                const Scalar to_x = (fundamental(x, x) - fundamental(y, x)) / pi(x);
                metric.distances(x, y) = metric.distances(y, x) = to_y + to_x;
                metric.max_finite_distance = std::max(metric.max_finite_distance, to_y + to_x);
            }
        }
        return metric;
    }

    /// Solves A X + X A^T = C by Bartels-Stewart on the complex Schur form of A.
    template <typename DerivedA, typename DerivedC>
    MatrixX<typename DerivedA::Scalar> solve_lyapunov(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedC>& c)
    {
        using Scalar = typename DerivedA::Scalar;
        using Complex = std::complex<Scalar>;
        using CMatrix = MatrixX<Complex>;
        const Eigen::Index n = a.rows();

        Eigen::ComplexSchur<MatrixX<Scalar>> schur(a.eval());
        if (schur.info() != Eigen::Success)
            throw NumericalError("solve_lyapunov: Schur decomposition did not converge");
        const CMatrix& u = schur.matrixU();
        const CMatrix& t = schur.matrixT();
        const CMatrix rhs = u.adjoint() * c.template cast<Complex>() * u;

        // T Y + Y T^H = rhs, columns from last to first.
        CMatrix y = CMatrix::Zero(n, n);
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            Eigen::Matrix<Complex, Eigen::Dynamic, 1> col = rhs.col(j);
            for (Eigen::Index k = j + 1; k < n; ++k)
                col -= std::conj(t(j, k)) * y.col(k);
            CMatrix shifted = t;
            shifted.diagonal().array() += std::conj(t(j, j));
            for (Eigen::Index i = 0; i < n; ++i)
                if (std::abs(shifted(i, i)) < Scalar(1e-14))
                    throw NumericalError("solve_lyapunov: A and -A^T share an eigenvalue");
            y.col(j) = shifted.template triangularView<Eigen::Upper>().solve(col);
        }
        MatrixX<Scalar> x = (u * y * u.adjoint()).real();
        if (!x.allFinite())
            throw NumericalError("solve_lyapunov: non-finite solution");
        return x;
    }

    /// Orthonormal basis (as columns) of the complement of the all-ones vector.
    template <typename Scalar>
    MatrixX<Scalar> ones_complement_basis(Eigen::Index n)
    {
        Eigen::HouseholderQR<MatrixX<Scalar>> qr(MatrixX<Scalar>::Ones(n, 1));
        MatrixX<Scalar> q = qr.householderQ();
        return q.rightCols(n - 1);
    }

    /// Effective resistance generalized to digraphs through the Lyapunov equation
    /// on the projected Laplacian; classical effective resistance for symmetric weights.
    template <typename Derived>
    MetricMatrix<typename Derived::Scalar> resistance_metric(const Eigen::MatrixBase<Derived>& weights)
    {
        using Scalar = typename Derived::Scalar;
        const Eigen::Index n = weights.rows();
        if (weights.cols() != n)
            throw StructuralError("resistance_metric: weight matrix must be square");
        if ((weights.array() < Scalar(0)).any())
            throw StructuralError("resistance_metric: negative weight");

        MetricMatrix<Scalar> metric;
        metric.kind = MetricKind::Resistance;
        metric.distances = MatrixX<Scalar>::Zero(n, n);
        if (n < 2)
            return metric;

        MatrixX<Scalar> laplacian = -weights;
        laplacian.diagonal() += weights.rowwise().sum();
        const MatrixX<Scalar> basis = ones_complement_basis<Scalar>(n);
        const MatrixX<Scalar> reduced = basis.transpose() * laplacian * basis;
        const MatrixX<Scalar> sigma_reduced = solve_lyapunov(reduced, MatrixX<Scalar>::Identity(n - 1, n - 1));
        const MatrixX<Scalar> sigma = basis * sigma_reduced * basis.transpose();

        for (Eigen::Index x = 0; x < n; ++x) {
            for (Eigen::Index y = x + 1; y < n; ++y) {
                const Scalar r = Scalar(2) * (sigma(x, x) + sigma(y, y) - Scalar(2) * sigma(x, y));
                metric.distances(x, y) = metric.distances(y, x) = r;
                metric.max_finite_distance = std::max(metric.max_finite_distance, r);
            }
        }
        return metric;
    }

    /// Adds one to the count of every edge the trace traverses.
    template <typename Scalar>
    void accumulate_edge_counts(MatrixX<Scalar>& counts, const Trace& trace)
    {
        for (std::size_t i = 1; i < trace.vertices.size(); ++i)
            counts(trace.vertices[i - 1], trace.vertices[i]) += Scalar(1);
    }

    /// BFS hop counts from the entry along directed edges.
    std::vector<int> entry_hop_distances(const Cfg& cfg);

} // namespace geofuzz
