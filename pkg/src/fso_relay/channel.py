"""Per-hop loss, turbulence statistics, and log-normal fading draws.

Each hop is summarised by a deterministic power gain (geometric spreading
times Beers-Lambert attenuation) and a log-normal fading distribution whose
log-variance is a quarter of the Rytov variance. The fading is normalised so
that the mean channel gain equals the deterministic path loss.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .params import ParameterError, SystemParams


@dataclass(frozen=True)
class HopChannel:
    """Derived channel state of a single hop.

    mu_l and sigma2_l are the log-domain mean and variance of the total
    gain h = path_loss * fading, with sigma2_l = rytov_var / 4 and
    mu_l = -rytov_var / 8 + ln(path_loss), so that E[h] = path_loss.
    """

    distance: float      # m
    xi: float            # scattering coefficient, 1/m
    path_loss: float     # deterministic gain, in (0, 1]
    rytov_var: float     # turbulence strength (dimensionless)
    mu_l: float
    sigma2_l: float


@dataclass(frozen=True)
class FadingRealization:
    """One joint draw of the three hop gains (source-relay, relay-relay, relay-dest).

    Sampled gains are always strictly positive; zero is accepted so that
    dead-hop limits can be evaluated explicitly.
    """

    h_sr: float
    h_rr: float
    h_rd: float

    def __post_init__(self) -> None:
        for name in ("h_sr", "h_rr", "h_rd"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
                raise ParameterError(f"{name} must be a non-negative finite gain, got {value!r}")


def scattering_coefficient(visibility_km: float, wavelength_nm: float) -> float:
    """Visibility-driven scattering coefficient in 1/km.

    xi = (3.91 / V) * (lambda_nm / 550)^(-q) with the size-distribution
    exponent q = 1.6 above 50 km visibility, 1.3 between 6 and 50 km, and
    0.585 * V^(1/3) at or below 6 km. Multiply by 1e-3 for 1/m.
    """
    if not (visibility_km > 0 and math.isfinite(visibility_km)):
        raise ParameterError(f"visibility_km must be positive, got {visibility_km!r}")
    if not (wavelength_nm > 0 and math.isfinite(wavelength_nm)):
        raise ParameterError(f"wavelength_nm must be positive, got {wavelength_nm!r}")
    if visibility_km > 50.0:
        q = 1.6
    elif visibility_km > 6.0:
        q = 1.3
    else:
        q = 0.585 * visibility_km ** (1.0 / 3.0)
    return 3.91 / visibility_km * (wavelength_nm / 550.0) ** (-q)


def path_loss(distance: float, divergence: float, aperture_area: float, xi: float) -> float:
    """Deterministic hop gain: divergence-cone capture times exp(-distance * xi).

    The geometric factor aperture_area / (divergence * distance / 2)^2 is
    clamped at 1 (an aperture cannot collect more than the full beam).
    """
    if not (distance > 0 and math.isfinite(distance)):
        raise ParameterError(f"distance must be positive, got {distance!r}")
    if not (divergence > 0 and math.isfinite(divergence)):
        raise ParameterError(f"divergence must be positive, got {divergence!r}")
    if not (aperture_area > 0 and math.isfinite(aperture_area)):
        raise ParameterError(f"aperture_area must be positive, got {aperture_area!r}")
    if not (xi >= 0 and math.isfinite(xi)):
        raise ParameterError(f"xi must be non-negative, got {xi!r}")
    geometric = aperture_area / (divergence * distance / 2.0) ** 2
    return min(geometric, 1.0) * math.exp(-distance * xi)


def rytov_variance(cn2: float, wavelength: float, distance: float) -> float:
    """Plane-wave Rytov variance 1.23 * Cn2 * (2 pi / lambda)^(7/6) * d^(11/6)."""
    if not (cn2 >= 0 and math.isfinite(cn2)):
        raise ParameterError(f"cn2 must be non-negative, got {cn2!r}")
    if not (wavelength > 0 and math.isfinite(wavelength)):
        raise ParameterError(f"wavelength must be positive, got {wavelength!r}")
    if not (distance >= 0 and math.isfinite(distance)):
        raise ParameterError(f"distance must be non-negative, got {distance!r}")
    wavenumber = 2.0 * math.pi / wavelength
    value = 1.23 * cn2 * wavenumber ** (7.0 / 6.0) * distance ** (11.0 / 6.0)
    if value > 1.0:
        warnings.warn(
            f"Rytov variance {value:.3g} exceeds 1; the log-normal weak-turbulence "
            "model is questionable at this strength",
            stacklevel=2,
        )
    return value


def build_hop(distance: float, params: SystemParams) -> HopChannel:
    """Assemble the full per-hop channel state for one link length."""
    xi = 1e-3 * scattering_coefficient(params.visibility_km, params.wavelength * 1e9)
    loss = path_loss(distance, params.divergence, params.aperture_area, xi)
    if loss <= 0.0:
        raise ParameterError(f"path loss underflowed to zero at distance {distance!r} m")
    rytov = rytov_variance(params.cn2, params.wavelength, distance)
    return HopChannel(
        distance=float(distance),
        xi=xi,
        path_loss=loss,
        rytov_var=rytov,
        mu_l=-rytov / 8.0 + math.log(loss),
        sigma2_l=rytov / 4.0,
    )


def fading_pdf(h_a: float, mu: float, sigma2: float) -> float:
    """Log-normal density of the fading gain; zero on the non-positive axis."""
    if not (sigma2 > 0 and math.isfinite(sigma2)):
        raise ParameterError(f"sigma2 must be positive, got {sigma2!r}")
    if not math.isfinite(mu):
        raise ParameterError(f"mu must be finite, got {mu!r}")
    if h_a <= 0.0:
        return 0.0
    sigma = math.sqrt(sigma2)
    z = (math.log(h_a) - mu) / sigma
    return math.exp(-0.5 * z * z) / (h_a * sigma * math.sqrt(2.0 * math.pi))


def hop_gains(hop: HopChannel, z):
    """Map standard-normal draws to channel gains for one hop.

    Computes path_loss * exp(sigma * z - sigma^2 / 2), which keeps the mean
    gain exactly at path_loss and degenerates to path_loss itself when the
    turbulence variance is zero.
    """
    return hop.path_loss * np.exp(np.sqrt(hop.sigma2_l) * z - 0.5 * hop.sigma2_l)


def fading_gains(hops: Sequence[HopChannel], z: np.ndarray) -> np.ndarray:
    """Map an (n, 3) array of standard normals to (n, 3) joint hop gains."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != len(hops):
        raise ValueError(f"draws must have shape (n, {len(hops)}), got {z.shape}")
    return np.stack([hop_gains(hop, z[:, k]) for k, hop in enumerate(hops)], axis=1)


def sample_fading(hops: Sequence[HopChannel], rng: np.random.Generator) -> FadingRealization:
    """Draw one independent log-normal gain per hop from the given stream."""
    if len(hops) != 3:
        raise ParameterError(f"expected 3 hops, got {len(hops)}")
    z = rng.standard_normal(3)
    gains = [float(hop_gains(hop, z[k])) for k, hop in enumerate(hops)]
    return FadingRealization(*gains)
