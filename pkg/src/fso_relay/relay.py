"""Photon statistics through the two amplified relays and the detector.

Every optical field in the chain is a Laguerre-distributed photon count
described by a noncentrality a (mean signal count), a per-mode noise count b,
and the number of optical modes D. Both relays run with full channel
knowledge: each one picks its gain so that its mean output photon count stays
at the configured budget regardless of the incoming fade. At the detector the
count is treated as Gaussian with the Laguerre mean and variance plus an
independent thermal term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import FadingRealization
from .params import ParameterError, SystemParams


class VarianceMode(enum.Enum):
    """Which expression supplies the signal-dependent variance at the detector."""

    MOMENT_COMPOSITION = "composed"   # Laguerre variance of the detected field (default)
    AS_PRINTED = "printed"            # literal nine-term expansion, kept for comparison
    LOW_BACKGROUND = "low-bg"         # signal-noise beat terms only
    THERMAL_LIMITED = "thermal"       # no signal-dependent variance at all


@dataclass(frozen=True)
class LaguerreParams:
    """Parameter triple (a, b, D) of a Laguerre-distributed photon count."""

    a: float      # noncentrality: mean signal photon count
    b: float      # per-mode noise photon count
    dof: int      # optical degrees of freedom

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
                raise ParameterError(f"{name} must be a non-negative finite count, got {value!r}")
        if not (isinstance(self.dof, int) and not isinstance(self.dof, bool) and self.dof >= 1):
            raise ParameterError(f"dof must be an integer >= 1, got {self.dof!r}")


@dataclass(frozen=True)
class DestinationStats:
    """Gaussian summary of the photo-electron count for one fading draw."""

    mean: float                    # photo-electron counts
    var_signal: float              # signal-dependent variance for the selected mode
    var_thermal: float             # receiver electronics variance
    var_total: float               # var_signal + var_thermal
    snr: float                     # electrical SNR
    breakdown: tuple[float, ...]   # the nine literal variance terms, always as printed


# Labels for DestinationStats.breakdown, in term order.
BREAKDOWN_LABELS = (
    "signal_shot",
    "relay1_noise_shot",
    "relay2_noise_shot",
    "relay1_noise_sq",
    "relay2_noise_sq",
    "relay1_relay2_beat",
    "signal_relay1_beat",
    "signal_relay2_beat",
    "dest_background",
)


class ChainComponents(NamedTuple):
    """Gains and detector-input building blocks for one or many fading draws.

    signal is the noncentral photon count reaching the detector; relay1_noise
    and relay2_noise are the per-mode amplified-noise counts contributed by
    each relay (background plus spontaneous emission) after all remaining
    hops; local_background is the per-mode count collected at the destination.
    """

    gain1: np.ndarray | float
    gain2: np.ndarray | float
    signal: np.ndarray | float
    relay1_noise: np.ndarray | float
    relay2_noise: np.ndarray | float
    local_background: float


def _laguerre_variance(a, b, dof):
    return a + dof * (b + b * b) + 2.0 * a * b


def laguerre_moments(p: LaguerreParams) -> tuple[float, float]:
    """Mean a + D*b and variance a + D*(b + b^2) + 2*a*b of the count."""
    return p.a + p.dof * p.b, _laguerre_variance(p.a, p.b, p.dof)


def full_csi_gain(m_target, m_signal_in, m_bg, n_sp, dof):
    """Gain that pins the relay's mean output count at m_target.

    G = m_target / (m_signal_in + D * (m_bg + n_sp)); accepts scalars or
    arrays of incoming signal counts.
    """
    for name, value in (("m_target", m_target), ("m_bg", m_bg), ("n_sp", n_sp)):
        if not (np.isscalar(value) and value >= 0 and math.isfinite(value)):
            raise ParameterError(f"{name} must be a non-negative finite scalar, got {value!r}")
    if np.any(np.asarray(m_signal_in) < 0):
        raise ParameterError("m_signal_in must be non-negative")
    denom = m_signal_in + dof * (m_bg + n_sp)
    if np.any(np.asarray(denom) <= 0):
        raise ValueError("relay gain is undefined: no incoming signal or noise photons")
    return m_target / denom


def chain_gains(fading: FadingRealization, params: SystemParams) -> tuple[float, float]:
    """Both relay gains for one fading draw."""
    c = chain_components(fading.h_sr, fading.h_rr, fading.h_rd, params)
    return float(c.gain1), float(c.gain2)


def chain_components(h_sr, h_rr, h_rd, params: SystemParams) -> ChainComponents:
    """Propagate the photon budgets through both relays down to the detector."""
    budget = params.photon_budget()
    n_sp, dof = params.n_sp, params.dof
    g1 = full_csi_gain(budget.m_relay1, budget.m_source * h_sr, budget.m_bg_relay1, n_sp, dof)
    g2 = full_csi_gain(budget.m_relay2, budget.m_relay1 * h_rr, budget.m_bg_relay2, n_sp, dof)
    g12 = g1 * g2
    return ChainComponents(
        gain1=g1,
        gain2=g2,
        signal=g12 * budget.m_source * h_sr * h_rr * h_rd,
        relay1_noise=g12 * (budget.m_bg_relay1 + n_sp) * h_rr * h_rd,
        relay2_noise=g2 * (budget.m_bg_relay2 + n_sp) * h_rd,
        local_background=budget.m_bg_dest,
    )


def relay1_output_params(fading: FadingRealization, params: SystemParams) -> LaguerreParams:
    """Laguerre parameters of the first relay's output field."""
    budget = params.photon_budget()
    g1 = full_csi_gain(budget.m_relay1, budget.m_source * fading.h_sr,
                       budget.m_bg_relay1, params.n_sp, params.dof)
    return LaguerreParams(
        a=float(g1 * budget.m_source * fading.h_sr),
        b=float(g1 * (budget.m_bg_relay1 + params.n_sp)),
        dof=params.dof,
    )


def relay2_output_params(fading: FadingRealization, params: SystemParams) -> LaguerreParams:
    """Laguerre parameters of the second relay's output field."""
    budget = params.photon_budget()
    n_sp, dof = params.n_sp, params.dof
    g1 = full_csi_gain(budget.m_relay1, budget.m_source * fading.h_sr, budget.m_bg_relay1, n_sp, dof)
    g2 = full_csi_gain(budget.m_relay2, budget.m_relay1 * fading.h_rr, budget.m_bg_relay2, n_sp, dof)
    return LaguerreParams(
        a=float(g1 * g2 * budget.m_source * fading.h_sr * fading.h_rr),
        b=float(g1 * g2 * (budget.m_bg_relay1 + n_sp) * fading.h_rr + g2 * (budget.m_bg_relay2 + n_sp)),
        dof=dof,
    )


def detector_input_params(fading: FadingRealization, params: SystemParams) -> LaguerreParams:
    """Laguerre parameters of the light hitting the photo-detector."""
    c = chain_components(fading.h_sr, fading.h_rr, fading.h_rd, params)
    return LaguerreParams(
        a=float(c.signal),
        b=float(c.relay1_noise + c.relay2_noise + c.local_background),
        dof=params.dof,
    )


def apply_detector(p: LaguerreParams, eta: float) -> LaguerreParams:
    """Photo-detection with quantum efficiency eta scales (a, b) to (eta*a, eta*b)."""
    if not (isinstance(eta, (int, float)) and 0.0 < eta <= 1.0):
        raise ParameterError(f"eta must lie in (0, 1], got {eta!r}")
    return LaguerreParams(a=eta * p.a, b=eta * p.b, dof=p.dof)


def thermal_noise_variance(params: SystemParams) -> float:
    """Receiver electronics variance 2*K_B*T_R*T_s / (R_L * e^2) in counts^2."""
    return (2.0 * params.boltzmann * params.receiver_temp * params.symbol_duration
            / (params.receiver_load * params.electron_charge ** 2))


def printed_variance_terms(c: ChainComponents, eta: float, dof: int) -> tuple:
    """The nine additive terms of the literal detected-count variance."""
    local_beat = 1.0 + 2.0 * eta * c.local_background
    return (
        eta * c.signal * local_beat,
        eta * dof * c.relay1_noise * local_beat,
        eta * dof * c.relay2_noise * local_beat,
        dof * (eta * c.relay1_noise) ** 2,
        dof * (eta * c.relay2_noise) ** 2,
        2.0 * eta ** 2 * c.relay1_noise * c.relay2_noise,
        2.0 * eta ** 2 * c.signal * c.relay1_noise,
        2.0 * eta ** 2 * c.signal * c.relay2_noise,
        eta * dof * (c.local_background + c.local_background ** 2),
    )


def signal_variance(c: ChainComponents, eta: float, dof: int, mode: VarianceMode):
    """Signal-dependent variance of the photo-electron count for one mode."""
    if mode is VarianceMode.THERMAL_LIMITED:
        return 0.0 * c.signal
    if mode is VarianceMode.LOW_BACKGROUND:
        return (2.0 * eta ** 2 * c.signal * c.relay1_noise
                + 2.0 * eta ** 2 * c.signal * c.relay2_noise)
    if mode is VarianceMode.AS_PRINTED:
        terms = printed_variance_terms(c, eta, dof)
        total = terms[0]
        for term in terms[1:]:
            total = total + term
        return total
    if mode is VarianceMode.MOMENT_COMPOSITION:
        detected_signal = eta * c.signal
        detected_noise = eta * (c.relay1_noise + c.relay2_noise + c.local_background)
        return _laguerre_variance(detected_signal, detected_noise, dof)
    raise ParameterError(f"unknown variance mode {mode!r}")


def electrical_snr(h_sr, h_rr, h_rd, params: SystemParams,
                   mode: VarianceMode = VarianceMode.MOMENT_COMPOSITION):
    """Electrical SNR (eta * signal)^2 / (signal variance + thermal variance).

    Accepts scalars or arrays of hop gains; gains are recomputed per draw.
    """
    c = chain_components(h_sr, h_rr, h_rd, params)
    var_total = signal_variance(c, params.eta, params.dof, mode) + thermal_noise_variance(params)
    return (params.eta * c.signal) ** 2 / var_total


def destination_stats(fading: FadingRealization, params: SystemParams,
                      mode: VarianceMode = VarianceMode.MOMENT_COMPOSITION) -> DestinationStats:
    """Full Gaussian summary of the detected count for one fading draw."""
    c = chain_components(fading.h_sr, fading.h_rr, fading.h_rd, params)
    eta, dof = params.eta, params.dof
    noise_per_mode = c.relay1_noise + c.relay2_noise + c.local_background
    mean = eta * c.signal + dof * (eta * noise_per_mode)
    var_signal = float(signal_variance(c, eta, dof, mode))
    var_thermal = thermal_noise_variance(params)
    var_total = var_signal + var_thermal
    snr = (eta * c.signal) ** 2 / var_total
    return DestinationStats(
        mean=float(mean),
        var_signal=var_signal,
        var_thermal=var_thermal,
        var_total=float(var_total),
        snr=float(snr),
        breakdown=tuple(float(t) for t in printed_variance_terms(c, eta, dof)),
    )
