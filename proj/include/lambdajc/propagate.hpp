// Time evolution under a TermList and Loschmidt echoes between two variants.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lambdajc/hamiltonian.hpp"
#include "lambdajc/hilbert.hpp"
#include "lambdajc/parallel.hpp"

namespace lambdajc {

inline constexpr double default_leakage_threshold = 1e-6;
inline constexpr double steps_per_period = 20.0;

/// n uniformly spaced times on [0, t_max], including both ends.
inline std::vector<double> uniform_times(double t_max, std::size_t n)
{
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("uniform_times: t_max must be positive");
    if (n < 2)
        throw std::invalid_argument("uniform_times: at least two samples are required");
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
    return t;
}

/// Largest admissible step: 20 steps per period of the fastest coefficient.
inline double step_bound(const TermList& h)
{
    const double r = h.max_rate();
    return r > 0.0 ? 2.0 * std::numbers::pi / (steps_per_period * r)
                   : std::numeric_limits<double>::infinity();
}

/// Default step: a quarter of the bound, which keeps dt-halving changes of
/// the sampled amplitudes well below 1e-6 at the default horizon.
inline double default_step(const TermList& h)
{
    return 0.25 * step_bound(h);
}

namespace detail {

inline constexpr double taylor_substep_norm = 0.5;

// v <- exp(-i dt H_c) v with H_c = sum_op coeff[op] op, by a truncated
// Taylor series on substeps of norm at most taylor_substep_norm.
inline void apply_exponential(const TermList& h, const std::vector<cplx>& coeff, double dt,
                              Amplitudes& v, Amplitudes& term, Amplitudes& scratch)
{
    const double norm = std::abs(dt) * h.norm_bound(coeff);
    if (norm == 0.0)
        return;
    const int substeps = std::max(1, static_cast<int>(std::ceil(norm / taylor_substep_norm)));
    const cplx factor(0.0, -dt / substeps);
    for (int s = 0; s < substeps; ++s) {
        term = v;
        for (int k = 1; k <= 60; ++k) {
            h.apply(coeff, term, scratch);
            term = (factor / static_cast<double>(k)) * scratch;
            v += term;
            if (term.norm() <= 1e-17 * v.norm())
                break;
        }
    }
}

} // namespace detail

/// Fourth-order commutator-free Magnus stepper with two exponentials per
/// step, evaluated at the Gauss-Legendre nodes.
class MagnusStepper {
public:
    explicit MagnusStepper(const TermList& h)
        : h_(h), term_(h.space().dim()), scratch_(h.space().dim())
    {
    }

    void step(Amplitudes& v, double t, double dt)
    {
        static const double r3 = std::sqrt(3.0);
        const double c1 = 0.5 - r3 / 6.0;
        const double c2 = 0.5 + r3 / 6.0;
        const double a1 = (3.0 - 2.0 * r3) / 12.0;
        const double a2 = (3.0 + 2.0 * r3) / 12.0;
        if (h_.time_independent()) {
            detail::apply_exponential(h_, h_.coefficients(0.0), dt, v, term_, scratch_);
            return;
        }
        const auto h1 = h_.coefficients(t + c1 * dt);
        const auto h2 = h_.coefficients(t + c2 * dt);
        std::vector<cplx> first(h1.size());
        std::vector<cplx> second(h1.size());
        for (std::size_t k = 0; k < h1.size(); ++k) {
            first[k] = a2 * h1[k] + a1 * h2[k];
            second[k] = a1 * h1[k] + a2 * h2[k];
        }
        detail::apply_exponential(h_, first, dt, v, term_, scratch_);
        detail::apply_exponential(h_, second, dt, v, term_, scratch_);
    }

private:
    const TermList& h_;
    Amplitudes term_;
    Amplitudes scratch_;
};

struct EvolveOptions {
    std::optional<double> dt_max;  // default_step() when empty
    double leakage_threshold = default_leakage_threshold;
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<Amplitudes> states;
    std::vector<double> leakage;  // top-Fock-level population at each sample
    double norm_drift = 0.0;      // max | ||psi|| - 1 | over samples
    double max_leakage = 0.0;     // max over every step
    double dt = 0.0;              // largest step actually taken
    std::size_t steps = 0;
    std::vector<std::string> warnings;
};

namespace detail {

// Flat indices of basis states with either mode in its top Fock level.
inline std::vector<Eigen::Index> top_level_indices(const HilbertSpace& space)
{
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < space.dim(); ++i) {
        const auto s = space.state(i);
        if (s.n1 == space.cutoff1() || s.n2 == space.cutoff2())
            out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
}

inline double population(const Amplitudes& v, const std::vector<Eigen::Index>& idx)
{
    double p = 0.0;
    for (auto i : idx)
        p += std::norm(v(i));
    return p;
}

} // namespace detail

/// Propagates psi0 under `h` and records the state at each sample time.
///
/// Sample times must be non-negative and non-decreasing. Each interval
/// between samples is split into equal steps no longer than dt_max.
inline EvolveResult evolve(const TermList& h, const StateVector& psi0,
                           const std::vector<double>& sample_times, const EvolveOptions& opt = {})
{
    if (!(psi0.space == h.space()))
        throw std::invalid_argument("evolve: initial state and Hamiltonian live on different spaces");
    if (sample_times.empty())
        throw std::invalid_argument("evolve: no sample times");
    const double bound = step_bound(h);
    const double dt_max = opt.dt_max.value_or(default_step(h));
    if (!(dt_max > 0.0))
        throw std::invalid_argument("evolve: dt_max must be positive");
    if (dt_max > bound)
        throw std::invalid_argument("evolve: dt_max = " + std::to_string(dt_max) +
                                    " exceeds the step bound 2 pi / (20 phi_max) = " +
                                    std::to_string(bound));

    EvolveResult out;
    out.times = sample_times;
    out.states.reserve(sample_times.size());
    out.leakage.reserve(sample_times.size());
    const auto top = detail::top_level_indices(h.space());

    MagnusStepper stepper(h);
    Amplitudes v = psi0.amplitudes;
    double t = 0.0;
    auto record = [&] {
        out.states.push_back(v);
        out.leakage.push_back(detail::population(v, top));
        out.norm_drift = std::max(out.norm_drift, std::abs(v.norm() - 1.0));
    };
    for (double target : sample_times) {
        if (!(target >= t) || !std::isfinite(target))
            throw std::invalid_argument("evolve: sample times must be finite, non-negative and "
                                        "non-decreasing");
        const double span = target - t;
        if (span > 0.0) {
            const auto n = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(span / dt_max)));
            const double dt = span / static_cast<double>(n);
            out.dt = std::max(out.dt, dt);
            for (std::size_t k = 0; k < n; ++k) {
                stepper.step(v, t + static_cast<double>(k) * dt, dt);
                out.max_leakage = std::max(out.max_leakage, detail::population(v, top));
            }
            out.steps += n;
            t = target;
        }
        record();
    }
    out.max_leakage = std::max(out.max_leakage, out.leakage.front());
    if (out.max_leakage > opt.leakage_threshold)
        out.warnings.push_back("truncation: top Fock level population " +
                               std::to_string(out.max_leakage) + " exceeds " +
                               std::to_string(opt.leakage_threshold));
    return out;
}

inline EvolveResult evolve(const HamiltonianSpec& spec, const StateVector& psi0,
                           const std::vector<double>& sample_times, const EvolveOptions& opt = {})
{
    return evolve(assemble_terms(spec, psi0.space), psi0, sample_times, opt);
}

struct EchoResult {
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<double> norm_a;
    std::vector<double> norm_b;
    std::vector<double> leakage; // larger of the two branches per sample
    double norm_drift = 0.0;
    double max_leakage = 0.0;
    std::vector<std::string> warnings;

    double min_fidelity() const
    {
        return fidelity.empty() ? 1.0 : *std::min_element(fidelity.begin(), fidelity.end());
    }
};

struct EchoOptions {
    EvolveOptions evolve;
    unsigned workers = 1; // the two branches run concurrently when > 1
};

/// F(t) = |<psi_a(t)|psi_b(t)>|^2 for two variants written in the same frame.
inline EchoResult loschmidt_echo(const HamiltonianSpec& spec_a, const HamiltonianSpec& spec_b,
                                 const StateVector& psi0, double t_max, std::size_t samples,
                                 const EchoOptions& opt = {})
{
    if (frame_of(spec_a.variant) != frame_of(spec_b.variant))
        throw std::invalid_argument(std::string("loschmidt_echo: ") +
                                    std::string(to_string(spec_a.variant)) + " and " +
                                    std::string(to_string(spec_b.variant)) +
                                    " are written in different frames");
    const auto times = uniform_times(t_max, samples);
    const HamiltonianSpec* specs[2] = {&spec_a, &spec_b};
    EvolveResult branch[2];
    parallel_for(2, opt.workers, [&](std::size_t k) {
        branch[k] = evolve(*specs[k], psi0, times, opt.evolve);
    });

    EchoResult out;
    out.times = times;
    out.fidelity.resize(samples);
    out.norm_a.resize(samples);
    out.norm_b.resize(samples);
    out.leakage.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto& a = branch[0].states[k];
        const auto& b = branch[1].states[k];
        out.fidelity[k] = std::norm(a.dot(b));
        out.norm_a[k] = a.norm();
        out.norm_b[k] = b.norm();
        out.leakage[k] = std::max(branch[0].leakage[k], branch[1].leakage[k]);
    }
    out.norm_drift = std::max(branch[0].norm_drift, branch[1].norm_drift);
    out.max_leakage = std::max(branch[0].max_leakage, branch[1].max_leakage);
    for (const auto& b : branch)
        out.warnings.insert(out.warnings.end(), b.warnings.begin(), b.warnings.end());
    return out;
}

} // namespace lambdajc
