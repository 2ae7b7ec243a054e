#include "boundwave/mirror.hpp"

#include <cmath>
#include <string>

#include "boundwave/errors.hpp"

namespace boundwave::mirror1d {

MirrorAmplitudes transmission_reflection(double k, double v_m)
{
    if (!std::isfinite(k) || k <= 0.0)
        throw DomainError("mirror1d", "wavenumber must be finite and positive, got k=" + std::to_string(k));
    if (!std::isfinite(v_m))
        throw DomainError("mirror1d", "mirror strength must be finite");

    MirrorAmplitudes out;
    out.k = k;
    out.v_m = v_m;
    if (v_m == 0.0)
        return out;  // exact (1, 0)

    const cplx denom{k, v_m};
    out.t = k / denom;
    out.r = cplx{0.0, -v_m} / denom;
    return out;
}

std::optional<Pole> pole_wavenumber(double v_m)
{
    if (v_m == 0.0)
        return std::nullopt;
    return Pole{cplx{0.0, -v_m}, v_m > 0.0 ? PoleKind::Resonance : PoleKind::BoundState};
}

}  // namespace boundwave::mirror1d
