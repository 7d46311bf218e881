"""System parameters, unit conversions, and per-terminal photon budgets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple


class ParameterError(ValueError):
    """A configuration value is missing, malformed, or violates a constraint."""


def dbm_to_watts(p_dbm: float) -> float:
    """Convert decibel-milliwatts to watts: 1e-3 * 10^(dBm/10)."""
    if not (isinstance(p_dbm, (int, float)) and math.isfinite(p_dbm)):
        raise ParameterError(f"dBm power must be a finite number, got {p_dbm!r}")
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Inverse of dbm_to_watts; requires a strictly positive power."""
    if not (isinstance(p_watts, (int, float)) and math.isfinite(p_watts) and p_watts > 0.0):
        raise ParameterError(f"power must be finite and positive, got {p_watts!r}")
    return 10.0 * math.log10(p_watts / 1e-3)


class PhotonBudget(NamedTuple):
    """Mean photon counts per symbol for each transmitter and background field."""

    m_source: float
    m_relay1: float
    m_relay2: float
    m_bg_relay1: float
    m_bg_relay2: float
    m_bg_dest: float


@dataclass(frozen=True)
class SystemParams:
    """Immutable bundle of every physical constant and link setting.

    Defaults describe the reference setup: a 5 km link at 1550 nm split
    across two amplified relays, 5 dBm transmit power per terminal, 100
    optical degrees of freedom, and 5 nW of filtered background light at
    each receiver. Instances are safe to share across threads.
    """

    wavelength: float = 1550e-9                  # m
    visibility_km: float = 1.5                   # km (the scattering model works in km)
    cn2: float = 1e-15                           # refractive index structure constant, m^(-2/3)
    aperture_area: float = math.pi * 0.1 ** 2    # m^2
    divergence: float = 1e-3                     # beam divergence angle, rad
    planck: float = 6.6e-34                      # J*s, rounded engineering value
    boltzmann: float = 1.38e-23                  # J/K
    light_speed: float = 3e8                     # m/s
    electron_charge: float = 1.602176634e-19     # C
    receiver_load: float = 100.0                 # ohm
    receiver_temp: float = 300.0                 # K
    symbol_rate: float = 2e9                     # symbols/s
    n_sp: float = 1.0                            # amplifier spontaneous emission factor
    dof: int = 100                               # optical degrees of freedom of the filtered noise field
    eta: float = 0.8                             # detector quantum efficiency
    p_source: float = dbm_to_watts(5.0)          # W
    p_relay1: float = dbm_to_watts(5.0)          # W
    p_relay2: float = dbm_to_watts(5.0)          # W
    p_bg_relay1: float = 5e-9                    # filtered background power at relay 1, W
    p_bg_relay2: float = 5e-9                    # filtered background power at relay 2, W
    p_bg_dest: float = 5e-9                      # filtered background power at destination, W
    d_sd: float = 5000.0                         # total source-to-destination distance, m

    _STRICTLY_POSITIVE = (
        "wavelength", "visibility_km", "aperture_area", "divergence",
        "planck", "boltzmann", "light_speed", "electron_charge",
        "receiver_load", "symbol_rate", "p_source", "p_relay1",
        "p_relay2", "d_sd",
    )
    # Background powers, n_sp and cn2 may be zero: the noiseless-amplifier and
    # turbulence-free limits are legitimate configurations.
    _NON_NEGATIVE = ("cn2", "receiver_temp", "n_sp", "p_bg_relay1", "p_bg_relay2", "p_bg_dest")

    def __post_init__(self) -> None:
        for name in self._STRICTLY_POSITIVE:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and not isinstance(value, bool)
                    and math.isfinite(value) and value > 0.0):
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        for name in self._NON_NEGATIVE:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and not isinstance(value, bool)
                    and math.isfinite(value) and value >= 0.0):
                raise ParameterError(f"{name} must be a non-negative finite number, got {value!r}")
        if not (isinstance(self.dof, int) and not isinstance(self.dof, bool) and self.dof >= 1):
            raise ParameterError(f"dof must be an integer >= 1, got {self.dof!r}")
        if not (isinstance(self.eta, (int, float)) and not isinstance(self.eta, bool)
                and 0.0 < self.eta <= 1.0):
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta!r}")

    @property
    def symbol_duration(self) -> float:
        """Symbol period in seconds, derived as 1/symbol_rate."""
        return 1.0 / self.symbol_rate

    @property
    def optical_frequency(self) -> float:
        """Carrier frequency c/wavelength in Hz."""
        return self.light_speed / self.wavelength

    def photon_budget(self) -> PhotonBudget:
        return PhotonBudget(
            m_source=photons_per_symbol(self.p_source, self),
            m_relay1=photons_per_symbol(self.p_relay1, self),
            m_relay2=photons_per_symbol(self.p_relay2, self),
            m_bg_relay1=photons_per_symbol(self.p_bg_relay1, self),
            m_bg_relay2=photons_per_symbol(self.p_bg_relay2, self),
            m_bg_dest=photons_per_symbol(self.p_bg_dest, self),
        )


def photons_per_symbol(power: float, params: SystemParams) -> float:
    """Mean photon count of one symbol: power * T_s / (h_p * nu) with nu = c/wavelength."""
    if not (isinstance(power, (int, float)) and not isinstance(power, bool)
            and math.isfinite(power) and power >= 0.0):
        raise ParameterError(f"power must be a non-negative finite number, got {power!r}")
    return power * params.symbol_duration * params.wavelength / (params.planck * params.light_speed)


# JSON config schema: key -> (field name, scale applied on load). "dbm" marks
# powers that are stored in watts but configured in dBm.
_CONFIG_FIELDS: dict[str, tuple[str, float | str | None]] = {
    "lambda_nm": ("wavelength", 1e-9),
    "visibility_km": ("visibility_km", 1.0),
    "cn2": ("cn2", 1.0),
    "aperture_area_m2": ("aperture_area", 1.0),
    "divergence_mrad": ("divergence", 1e-3),
    "symbol_rate_hz": ("symbol_rate", 1.0),
    "n_sp": ("n_sp", 1.0),
    "dof": ("dof", None),
    "eta": ("eta", 1.0),
    "p_source_dbm": ("p_source", "dbm"),
    "p_relay1_dbm": ("p_relay1", "dbm"),
    "p_relay2_dbm": ("p_relay2", "dbm"),
    "p_bg_relay1_w": ("p_bg_relay1", 1.0),
    "p_bg_relay2_w": ("p_bg_relay2", 1.0),
    "p_bg_dest_w": ("p_bg_dest", 1.0),
    "d_sd_m": ("d_sd", 1.0),
    "receiver_load_ohm": ("receiver_load", 1.0),
    "receiver_temp_k": ("receiver_temp", 1.0),
    "planck": ("planck", 1.0),
    "boltzmann": ("boltzmann", 1.0),
    "light_speed": ("light_speed", 1.0),
    "electron_charge": ("electron_charge", 1.0),
}


def _reject_nonfinite(token: str) -> float:
    raise ParameterError(f"non-finite value {token!r} is not allowed in config")


def load_params(config_text: str) -> SystemParams:
    """Build validated SystemParams from a JSON object; omitted keys keep defaults."""
    try:
        raw = json.loads(config_text, parse_constant=_reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object")
    kwargs: dict[str, float | int] = {}
    for key, value in raw.items():
        if key not in _CONFIG_FIELDS:
            raise ParameterError(f"unknown config key {key!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterError(f"{key} must be a number, got {value!r}")
        field_name, scale = _CONFIG_FIELDS[key]
        if scale is None:  # dof: integral values only
            if float(value) != int(value):
                raise ParameterError(f"{key} must be an integer, got {value!r}")
            kwargs[field_name] = int(value)
        elif scale == "dbm":
            kwargs[field_name] = dbm_to_watts(float(value))
        else:
            kwargs[field_name] = float(value) * scale
    return SystemParams(**kwargs)


def params_to_config(params: SystemParams) -> dict[str, float | int]:
    """Config-schema dict that load_params maps back onto these parameters."""
    return {
        "lambda_nm": params.wavelength * 1e9,
        "visibility_km": params.visibility_km,
        "cn2": params.cn2,
        "aperture_area_m2": params.aperture_area,
        "divergence_mrad": params.divergence * 1e3,
        "symbol_rate_hz": params.symbol_rate,
        "n_sp": params.n_sp,
        "dof": params.dof,
        "eta": params.eta,
        "p_source_dbm": watts_to_dbm(params.p_source),
        "p_relay1_dbm": watts_to_dbm(params.p_relay1),
        "p_relay2_dbm": watts_to_dbm(params.p_relay2),
        "p_bg_relay1_w": params.p_bg_relay1,
        "p_bg_relay2_w": params.p_bg_relay2,
        "p_bg_dest_w": params.p_bg_dest,
        "d_sd_m": params.d_sd,
        "receiver_load_ohm": params.receiver_load,
        "receiver_temp_k": params.receiver_temp,
        "planck": params.planck,
        "boltzmann": params.boltzmann,
        "light_speed": params.light_speed,
        "electron_charge": params.electron_charge,
    }


def serialize_params(params: SystemParams) -> str:
    """JSON text accepted by load_params that reproduces these parameters."""
    return json.dumps(params_to_config(params), indent=2, sort_keys=True)
