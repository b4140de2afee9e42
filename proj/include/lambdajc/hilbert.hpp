// Truncated atom x mode-1 x mode-2 Hilbert space, elementary operators and
// initial states.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lambdajc {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Amplitudes = Eigen::VectorXcd;

struct BasisState {
    int atom; // 1, 2 or 3
    int n1;
    int n2;
    friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// Product space |k>_at (x) |n1> (x) |n2> with Fock cutoffs n1 <= n_c1,
/// n2 <= n_c2. Flat index is lexicographic: atom outermost, n2 innermost.
class HilbertSpace {
public:
    HilbertSpace(int n_c1, int n_c2) : n_c1_(n_c1), n_c2_(n_c2)
    {
        if (n_c1 < 1 || n_c2 < 1)
            throw std::invalid_argument("HilbertSpace: Fock cutoffs must be >= 1");
    }

    int cutoff1() const { return n_c1_; }
    int cutoff2() const { return n_c2_; }
    std::size_t dim() const { return 3u * stride_atom(); }

    std::size_t index(int atom, int n1, int n2) const
    {
        if (atom < 1 || atom > 3 || n1 < 0 || n1 > n_c1_ || n2 < 0 || n2 > n_c2_)
            throw std::out_of_range("HilbertSpace::index: basis state outside the truncation");
        return static_cast<std::size_t>(atom - 1) * stride_atom() +
               static_cast<std::size_t>(n1) * static_cast<std::size_t>(n_c2_ + 1) +
               static_cast<std::size_t>(n2);
    }

    BasisState state(std::size_t idx) const
    {
        if (idx >= dim())
            throw std::out_of_range("HilbertSpace::state: index out of range");
        const auto per_atom = stride_atom();
        const auto modes = idx % per_atom;
        return {static_cast<int>(idx / per_atom) + 1,
                static_cast<int>(modes / static_cast<std::size_t>(n_c2_ + 1)),
                static_cast<int>(modes % static_cast<std::size_t>(n_c2_ + 1))};
    }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

private:
    std::size_t stride_atom() const
    {
        return static_cast<std::size_t>(n_c1_ + 1) * static_cast<std::size_t>(n_c2_ + 1);
    }

    int n_c1_;
    int n_c2_;
};

namespace ops {

template <typename Entry>
SparseOp build(const HilbertSpace& space, Entry&& entry)
{
    std::vector<Eigen::Triplet<cplx>> triplets;
    const auto d = space.dim();
    for (std::size_t col = 0; col < d; ++col) {
        const BasisState s = space.state(col);
        entry(s, [&](const BasisState& target, double value) {
            triplets.emplace_back(static_cast<int>(space.index(target.atom, target.n1, target.n2)),
                                  static_cast<int>(col), value);
        });
    }
    SparseOp m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

/// Atomic transition sigma_kj = |k><j|.
inline SparseOp sigma(const HilbertSpace& space, int k, int j)
{
    if (k < 1 || k > 3 || j < 1 || j > 3)
        throw std::invalid_argument("sigma: atomic levels are 1, 2, 3");
    return build(space, [&](const BasisState& s, auto&& emit) {
        if (s.atom == j)
            emit(BasisState{k, s.n1, s.n2}, 1.0);
    });
}

/// Annihilation operator of cavity mode 1 or 2.
inline SparseOp lower(const HilbertSpace& space, int mode)
{
    if (mode != 1 && mode != 2)
        throw std::invalid_argument("lower: mode must be 1 or 2");
    return build(space, [&](const BasisState& s, auto&& emit) {
        const int n = mode == 1 ? s.n1 : s.n2;
        if (n == 0)
            return;
        BasisState t = s;
        (mode == 1 ? t.n1 : t.n2) -= 1;
        emit(t, std::sqrt(static_cast<double>(n)));
    });
}

inline SparseOp raise(const HilbertSpace& space, int mode)
{
    return SparseOp(lower(space, mode).adjoint());
}

inline SparseOp number(const HilbertSpace& space, int mode)
{
    if (mode != 1 && mode != 2)
        throw std::invalid_argument("number: mode must be 1 or 2");
    return build(space, [&](const BasisState& s, auto&& emit) {
        const int n = mode == 1 ? s.n1 : s.n2;
        if (n != 0)
            emit(s, static_cast<double>(n));
    });
}

inline SparseOp identity(const HilbertSpace& space)
{
    return build(space, [](const BasisState& s, auto&& emit) { emit(s, 1.0); });
}

} // namespace ops

/// Normalised amplitude vector on a truncated space.
struct StateVector {
    HilbertSpace space;
    Amplitudes amplitudes;

    double norm() const { return amplitudes.norm(); }

    /// Population of level `atom` traced over both modes.
    double atomic_population(int atom) const
    {
        double p = 0.0;
        for (int n1 = 0; n1 <= space.cutoff1(); ++n1)
            for (int n2 = 0; n2 <= space.cutoff2(); ++n2)
                p += std::norm(amplitudes(static_cast<Eigen::Index>(space.index(atom, n1, n2))));
        return p;
    }

    /// Population with the given mode in its top Fock level.
    double top_level_population(int mode) const
    {
        double p = 0.0;
        for (std::size_t i = 0; i < space.dim(); ++i) {
            const auto s = space.state(i);
            if ((mode == 1 ? s.n1 == space.cutoff1() : s.n2 == space.cutoff2()))
                p += std::norm(amplitudes(static_cast<Eigen::Index>(i)));
        }
        return p;
    }

    double mean_photons(int mode) const
    {
        double n = 0.0;
        for (std::size_t i = 0; i < space.dim(); ++i) {
            const auto s = space.state(i);
            n += (mode == 1 ? s.n1 : s.n2) * std::norm(amplitudes(static_cast<Eigen::Index>(i)));
        }
        return n;
    }
};

inline cplx overlap(const StateVector& a, const StateVector& b)
{
    if (!(a.space == b.space))
        throw std::invalid_argument("overlap: states live on different spaces");
    return a.amplitudes.dot(b.amplitudes); // conjugates the first argument
}

/// Atomic factor of a product initial state.
enum class AtomicState { level1, level2, level3, minus12, plus13, plus23 };

inline std::string_view to_string(AtomicState a)
{
    switch (a) {
    case AtomicState::level1: return "1";
    case AtomicState::level2: return "2";
    case AtomicState::level3: return "3";
    case AtomicState::minus12: return "1-2";
    case AtomicState::plus13: return "1+3";
    case AtomicState::plus23: return "2+3";
    }
    return "?";
}

inline AtomicState parse_atomic_state(std::string_view tag)
{
    for (auto a : {AtomicState::level1, AtomicState::level2, AtomicState::level3,
                   AtomicState::minus12, AtomicState::plus13, AtomicState::plus23})
        if (to_string(a) == tag)
            return a;
    throw std::invalid_argument("unknown initial_state '" + std::string(tag) +
                                "' (expected 1, 2, 3, 1-2, 1+3 or 2+3)");
}

/// Amplitudes on |1>, |2>, |3>.
inline std::array<double, 3> atomic_amplitudes(AtomicState a)
{
    const double h = 1.0 / std::sqrt(2.0);
    switch (a) {
    case AtomicState::level1: return {1.0, 0.0, 0.0};
    case AtomicState::level2: return {0.0, 1.0, 0.0};
    case AtomicState::level3: return {0.0, 0.0, 1.0};
    case AtomicState::minus12: return {h, -h, 0.0};
    case AtomicState::plus13: return {h, 0.0, h};
    case AtomicState::plus23: return {0.0, h, h};
    }
    return {0.0, 0.0, 0.0};
}

class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int required_cutoff)
        : std::runtime_error(what), required_cutoff_(required_cutoff)
    {
    }
    int required_cutoff() const { return required_cutoff_; }

private:
    int required_cutoff_;
};

inline constexpr double coherent_leakage_limit = 1e-12;

/// Weight of a coherent state above Fock level `cutoff`, summed directly.
inline double coherent_tail(cplx alpha, int cutoff)
{
    const double a2 = std::norm(alpha);
    double w = std::exp(-a2); // |c_0|^2
    for (int n = 1; n <= cutoff; ++n)
        w *= a2 / n;
    double tail = 0.0;
    for (int n = cutoff + 1; n < cutoff + 10000; ++n) {
        w *= a2 / n;
        tail += w;
        if (w <= 1e-30 * tail || w == 0.0)
            break;
    }
    return tail;
}

/// Smallest Fock cutoff whose coherent-state tail is below `limit`.
inline int required_coherent_cutoff(cplx alpha, double limit = coherent_leakage_limit)
{
    int c = 0;
    while (coherent_tail(alpha, c) >= limit)
        ++c;
    return c;
}

/// Product state atom (x) |alpha1> (x) |alpha2>, truncated and renormalised.
inline StateVector coherent_state(const HilbertSpace& space, cplx alpha1, cplx alpha2,
                                  AtomicState atom)
{
    const cplx alphas[2] = {alpha1, alpha2};
    const int cutoffs[2] = {space.cutoff1(), space.cutoff2()};
    std::vector<cplx> fock[2];
    for (int mode = 0; mode < 2; ++mode) {
        const double tail = coherent_tail(alphas[mode], cutoffs[mode]);
        if (tail >= coherent_leakage_limit) {
            const int need = required_coherent_cutoff(alphas[mode]);
            throw TruncationError("coherent_state: mode " + std::to_string(mode + 1) +
                                      " loses " + std::to_string(tail) +
                                      " of its weight above the cutoff; use a cutoff of at least " +
                                      std::to_string(need),
                                  need);
        }
        auto& c = fock[mode];
        c.resize(static_cast<std::size_t>(cutoffs[mode]) + 1);
        c[0] = std::exp(-0.5 * std::norm(alphas[mode]));
        for (int n = 1; n <= cutoffs[mode]; ++n)
            c[static_cast<std::size_t>(n)] =
                c[static_cast<std::size_t>(n) - 1] * alphas[mode] / std::sqrt(static_cast<double>(n));
    }

    StateVector psi{space, Amplitudes::Zero(static_cast<Eigen::Index>(space.dim()))};
    const auto at = atomic_amplitudes(atom);
    for (int k = 1; k <= 3; ++k) {
        const double ak = at[static_cast<std::size_t>(k - 1)];
        if (ak == 0.0)
            continue;
        for (int n1 = 0; n1 <= space.cutoff1(); ++n1)
            for (int n2 = 0; n2 <= space.cutoff2(); ++n2)
                psi.amplitudes(static_cast<Eigen::Index>(space.index(k, n1, n2))) =
                    ak * fock[0][static_cast<std::size_t>(n1)] * fock[1][static_cast<std::size_t>(n2)];
    }
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

/// Basis state as a StateVector.
inline StateVector basis_state(const HilbertSpace& space, int atom, int n1, int n2)
{
    StateVector psi{space, Amplitudes::Zero(static_cast<Eigen::Index>(space.dim()))};
    psi.amplitudes(static_cast<Eigen::Index>(space.index(atom, n1, n2))) = 1.0;
    return psi;
}

} // namespace lambdajc
