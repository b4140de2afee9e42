// Hamiltonian variants of the driven Lambda system, assembled as constant
// sparse operators with harmonic time coefficients.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lambdajc/effective.hpp"
#include "lambdajc/hilbert.hpp"
#include "lambdajc/params.hpp"
#include "lambdajc/specfun.hpp"

namespace lambdajc {

enum class Variant {
    jc_static,        // bare JC Hamiltonian, lab frame
    rotating,         // drive frame, full sideband expansion
    effective,        // drive frame, zeroth and n0/m0 sidebands only
    effective1_tilde, // effective frame, static, with counter-rotating g_c terms
    jc3_tilde,        // effective frame, static JC form
};

/// Frame a variant is written in. States are only comparable within a frame.
enum class Frame { lab, drive, effective };

inline Frame frame_of(Variant v)
{
    switch (v) {
    case Variant::jc_static: return Frame::lab;
    case Variant::rotating:
    case Variant::effective: return Frame::drive;
    case Variant::effective1_tilde:
    case Variant::jc3_tilde: return Frame::effective;
    }
    return Frame::lab;
}

inline std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::jc_static: return "H_JC_static";
    case Variant::rotating: return "H_rot";
    case Variant::effective: return "H_eff";
    case Variant::effective1_tilde: return "H_eff1_tilde";
    case Variant::jc3_tilde: return "H_3JC_tilde";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s)
{
    for (auto v : {Variant::jc_static, Variant::rotating, Variant::effective,
                   Variant::effective1_tilde, Variant::jc3_tilde})
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument("unknown Hamiltonian variant '" + std::string(s) + "'");
}

struct HamiltonianSpec {
    Variant variant = Variant::jc_static;
    SystemParams sys;
    DriveParams drive; // ignored by jc_static
    double sideband_eps = default_sideband_eps;
    DetuningConvention convention = DetuningConvention::signed_value;
};

/// One term amplitude * exp(i rate t) * op. `partner` indexes the term
/// holding the Hermitian conjugate (itself for Hermitian static terms).
struct Term {
    std::size_t op;
    cplx amplitude;
    double rate;
    std::size_t partner;
};

/// H(t) = sum_k amplitude_k exp(i rate_k t) operators[op_k].
class TermList {
public:
    TermList(HilbertSpace space, Frame frame) : space_(space), frame_(frame) {}

    const HilbertSpace& space() const { return space_; }
    Frame frame() const { return frame_; }
    const std::vector<Term>& terms() const { return terms_; }
    const std::vector<SparseOp>& operators() const { return operators_; }
    const std::vector<std::string>& operator_names() const { return names_; }
    std::size_t size() const { return terms_.size(); }

    /// Number of sideband orders kept per expansion (largest cutoff P).
    int retained_orders = 0;

    /// Registers op (once per name) and returns its slot.
    std::size_t operator_slot(const std::string& name, const SparseOp& op)
    {
        auto it = slots_.find(name);
        if (it != slots_.end())
            return it->second;
        operators_.push_back(op);
        names_.push_back(name);
        op_norms_.push_back(one_norm(op));
        const std::size_t slot = operators_.size() - 1;
        slots_.emplace(name, slot);
        return slot;
    }

    /// Adds a static Hermitian term with real amplitude.
    void add_hermitian(const std::string& name, const SparseOp& op, double amplitude)
    {
        const std::size_t slot = operator_slot(name, op);
        terms_.push_back({slot, cplx(amplitude, 0.0), 0.0, terms_.size()});
    }

    /// Adds amplitude e^{i rate t} op together with its exact conjugate
    /// conj(amplitude) e^{-i rate t} op^dag.
    void add_pair(const std::string& name, const SparseOp& op, const std::string& adj_name,
                  cplx amplitude, double rate)
    {
        const std::size_t a = operator_slot(name, op);
        const std::size_t b = operator_slot(adj_name, SparseOp(op.adjoint()));
        const std::size_t first = terms_.size();
        terms_.push_back({a, amplitude, rate, first + 1});
        terms_.push_back({b, std::conj(amplitude), -rate, first});
    }

    double max_rate() const
    {
        double r = 0.0;
        for (const auto& t : terms_)
            r = std::max(r, std::abs(t.rate));
        return r;
    }

    bool time_independent() const { return max_rate() == 0.0; }

    /// Per-operator coefficient sum at time t.
    std::vector<cplx> coefficients(double t) const
    {
        std::vector<cplx> c(operators_.size(), cplx(0.0, 0.0));
        for (const auto& term : terms_)
            c[term.op] += term.amplitude * std::polar(1.0, term.rate * t);
        return c;
    }

    /// out = sum_op coeff[op] * operators[op] * in.
    void apply(const std::vector<cplx>& coeff, const Amplitudes& in, Amplitudes& out) const
    {
        out.setZero(in.size());
        for (std::size_t k = 0; k < operators_.size(); ++k)
            if (coeff[k] != cplx(0.0, 0.0))
                out.noalias() += coeff[k] * (operators_[k] * in);
    }

    /// Upper bound of the induced 1-norm of sum_op coeff[op] * operators[op].
    double norm_bound(const std::vector<cplx>& coeff) const
    {
        double s = 0.0;
        for (std::size_t k = 0; k < operators_.size(); ++k)
            s += std::abs(coeff[k]) * op_norms_[k];
        return s;
    }

    /// Instantaneous Hamiltonian as a sparse matrix.
    SparseOp at(double t) const
    {
        const auto c = coefficients(t);
        SparseOp h(static_cast<Eigen::Index>(space_.dim()), static_cast<Eigen::Index>(space_.dim()));
        for (std::size_t k = 0; k < operators_.size(); ++k)
            h += c[k] * operators_[k];
        return h;
    }

private:
    static double one_norm(const SparseOp& op)
    {
        Eigen::VectorXd colsum = Eigen::VectorXd::Zero(op.cols());
        for (Eigen::Index r = 0; r < op.outerSize(); ++r)
            for (SparseOp::InnerIterator it(op, r); it; ++it)
                colsum(it.col()) += std::abs(it.value());
        return op.cols() > 0 ? colsum.maxCoeff() : 0.0;
    }

    HilbertSpace space_;
    Frame frame_;
    std::vector<SparseOp> operators_;
    std::vector<std::string> names_;
    std::vector<double> op_norms_;
    std::map<std::string, std::size_t> slots_;
    std::vector<Term> terms_;
};

namespace detail {

// Diagonal part w1 (s33 - s11) + w2 (s33 - s22) + W1 n1 + W2 n2.
inline SparseOp bare_diagonal(const HilbertSpace& space, double w1, double w2, double W1, double W2)
{
    return ops::build(space, [&](const BasisState& s, auto&& emit) {
        double e = W1 * s.n1 + W2 * s.n2;
        if (s.atom == 3)
            e += w1 + w2;
        else if (s.atom == 1)
            e -= w1;
        else
            e -= w2;
        if (e != 0.0)
            emit(s, e);
    });
}

struct CouplingOps {
    SparseOp s31a1;  // mode-1 rotating
    SparseOp s31a1d; // mode-1 counter-rotating
    SparseOp s32a2;
    SparseOp s32a2d;
};

inline CouplingOps coupling_ops(const HilbertSpace& space)
{
    const SparseOp s31 = ops::sigma(space, 3, 1);
    const SparseOp s32 = ops::sigma(space, 3, 2);
    const SparseOp a1 = ops::lower(space, 1);
    const SparseOp a2 = ops::lower(space, 2);
    return {SparseOp(s31 * a1), SparseOp(s31 * a1.adjoint()), SparseOp(s32 * a2),
            SparseOp(s32 * a2.adjoint())};
}

} // namespace detail

/// Builds the term list of `spec` on `space`.
///
/// The drive-frame variants carry only interaction terms. Each coupling is
/// added once with its exact Hermitian conjugate, so the conjugate of the
/// mode-1 rotating term oscillates as e^{-i delta1 t}. In the rotating
/// variant every sideband with |J| >= sideband_eps is kept; the effective
/// variant always carries its eight terms.
inline TermList assemble_terms(const HamiltonianSpec& spec, const HilbertSpace& space)
{
    const auto& sys = spec.sys;
    const auto c = detail::coupling_ops(space);
    TermList list(space, frame_of(spec.variant));

    auto add_mode1 = [&](cplx amp, double rate) {
        list.add_pair("s31 a1", c.s31a1, "s13 a1+", amp, rate);
    };
    auto add_mode1_counter = [&](cplx amp, double rate) {
        list.add_pair("s31 a1+", c.s31a1d, "s13 a1", amp, rate);
    };
    auto add_mode2 = [&](cplx amp, double rate) {
        list.add_pair("s32 a2", c.s32a2, "s23 a2+", amp, rate);
    };
    auto add_mode2_counter = [&](cplx amp, double rate) {
        list.add_pair("s32 a2+", c.s32a2d, "s23 a2", amp, rate);
    };

    if (spec.variant == Variant::jc_static) {
        list.add_hermitian("bare", detail::bare_diagonal(space, sys.omega1, sys.omega2, sys.Omega1,
                                                         sys.Omega2),
                           1.0);
        add_mode1(sys.g1, 0.0);
        add_mode2(sys.g2, 0.0);
        return list;
    }

    spec.drive.validate();
    if (!(spec.sideband_eps > 0.0))
        throw std::invalid_argument("assemble_terms: sideband_eps must be positive");
    const SidebandInfo sb = find_sidebands(sys, spec.drive);
    const double theta = spec.drive.theta();
    const double wd = spec.drive.frequency;
    const auto carriers = counter_rotating_carriers(sys);

    switch (spec.variant) {
    case Variant::rotating: {
        const int p1 = sideband_cutoff(theta, spec.sideband_eps);
        const int p2 = sideband_cutoff(2.0 * theta, spec.sideband_eps);
        list.retained_orders = std::max(p1, p2);
        const auto j1 = bessel_j_range(p1, theta);
        const auto j2 = bessel_j_range(p2, 2.0 * theta);
        auto weight = [](const std::vector<double>& j, int p) {
            const double v = j[static_cast<std::size_t>(std::abs(p))];
            return (p < 0 && (-p) % 2 == 1) ? -v : v;
        };
        for (int p = -p1; p <= p1; ++p) {
            const double w = sys.g1 * weight(j1, p);
            if (std::abs(weight(j1, p)) < spec.sideband_eps)
                continue;
            add_mode1(w, sb.delta1 + p * wd);
            add_mode1_counter(w, carriers.mode1 + p * wd);
        }
        for (int q = -p2; q <= p2; ++q) {
            const double w = sys.g2 * weight(j2, q);
            if (std::abs(weight(j2, q)) < spec.sideband_eps)
                continue;
            add_mode2(w, sb.delta2 + q * wd);
            add_mode2_counter(w, carriers.mode2 + q * wd);
        }
        return list;
    }
    case Variant::effective: {
        add_mode1(sys.g1 * bessel_j(0, theta), sb.delta1);
        add_mode1_counter(sys.g1 * bessel_j(sb.n0, theta), sb.Delta_n0);
        add_mode2(sys.g2 * bessel_j(0, 2.0 * theta), sb.delta2);
        add_mode2_counter(sys.g2 * bessel_j(sb.m0, 2.0 * theta), sb.Delta_m0);
        return list;
    }
    case Variant::effective1_tilde:
    case Variant::jc3_tilde: {
        const auto eff = effective_parameters(sys, spec.drive, sb, spec.convention);
        list.add_hermitian("bare~",
                           detail::bare_diagonal(space, eff.omega1_eff, eff.omega2_eff,
                                                 eff.Omega1_eff, eff.Omega2_eff),
                           1.0);
        add_mode1(eff.gr1, 0.0);
        add_mode2(eff.gr2, 0.0);
        if (spec.variant == Variant::effective1_tilde) {
            add_mode1_counter(eff.gc1, 0.0);
            add_mode2_counter(eff.gc2, 0.0);
        }
        return list;
    }
    case Variant::jc_static: break;
    }
    return list;
}

} // namespace lambdajc
