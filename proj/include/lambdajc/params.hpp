// Static model and drive parameters (hbar = 1 units).
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lambdajc {

/// Frequencies and couplings of the Lambda-type atom in the two-mode cavity.
///
/// Atomic energies are -omega1 (|1>), -omega2 (|2>) and omega1 + omega2 (|3>);
/// mode 1 couples |1> <-> |3>, mode 2 couples |2> <-> |3>. The defaults are the
/// resonant reference point (delta1 = delta2 = 0) with weak coupling.
///
/// The struct is also used to carry drive-renormalised parameters into the
/// block engine, where negative frequencies are legal; call validate() only
/// on user-facing inputs.
struct SystemParams {
    double omega1 = 0.5;
    double omega2 = 0.25;
    double Omega1 = 1.25;
    double Omega2 = 1.0;
    double g1 = 0.05;
    double g2 = 0.05;

    void validate() const
    {
        auto require = [](bool ok, const char* what) {
            if (!ok)
                throw std::invalid_argument(std::string("constraint violated: ") + what);
        };
        require(std::isfinite(omega1), "omega1 finite");
        require(std::isfinite(omega2), "omega2 finite");
        require(std::isfinite(Omega1) && Omega1 > 0.0, "Omega1 > 0");
        require(std::isfinite(Omega2) && Omega2 > 0.0, "Omega2 > 0");
        require(std::isfinite(g1) && g1 >= 0.0, "g1 >= 0");
        require(std::isfinite(g2) && g2 >= 0.0, "g2 >= 0");
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Sinusoidal modulation A_D cos(omega_D t) on sigma_33 - sigma_22.
struct DriveParams {
    double amplitude = 0.0;
    double frequency = 0.18;

    static DriveParams from_theta(double theta, double frequency)
    {
        return DriveParams{theta * frequency, frequency};
    }

    /// Modulation index theta = A_D / omega_D.
    double theta() const { return amplitude / frequency; }

    void validate() const
    {
        if (!std::isfinite(frequency) || frequency <= 0.0)
            throw std::invalid_argument("constraint violated: frequency > 0");
        if (!std::isfinite(amplitude) || amplitude < 0.0)
            throw std::invalid_argument("constraint violated: amplitude >= 0");
    }

    friend bool operator==(const DriveParams&, const DriveParams&) = default;
};

} // namespace lambdajc
