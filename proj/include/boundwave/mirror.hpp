#pragma once

#include <complex>
#include <optional>

namespace boundwave::mirror1d {

using cplx = std::complex<double>;

/// Plane-wave scattering of a single unit-mass particle (hbar = 1, kinetic
/// term p^2/2) off V_m delta(x). Wavefunction e^{ikx} + r e^{-ikx} left of
/// the mirror, t e^{ikx} right of it.
struct MirrorAmplitudes {
    double k = 0.0;
    double v_m = 0.0;
    cplx t{1.0, 0.0};
    cplx r{0.0, 0.0};

    [[nodiscard]] double transmission() const { return std::norm(t); }
    [[nodiscard]] double reflection() const { return std::norm(r); }
};

/// Throws DomainError for non-finite or non-positive k, or non-finite V_m.
MirrorAmplitudes transmission_reflection(double k, double v_m);

enum class PoleKind { Resonance, BoundState };

struct Pole {
    cplx k;
    PoleKind kind;
};

/// k_pole = -i V_m. Returns nullopt for V_m = 0 (free particle, no pole).
std::optional<Pole> pole_wavenumber(double v_m);

}  // namespace boundwave::mirror1d
