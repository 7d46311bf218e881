"""Independent high-precision evaluators used to freeze expected test values.

Everything here is coded directly from the model formulas with mpmath at 50
significant digits and deliberately shares no code with the package under
test.
"""

import mpmath as mp

mp.mp.dps = 50


def dbm_to_watts(p_dbm):
    return mp.mpf(10) ** (mp.mpf(p_dbm) / 10) / 1000


def photons_per_symbol(power_w, t_s, wavelength_m, planck, light_speed):
    return mp.mpf(power_w) * mp.mpf(t_s) * mp.mpf(wavelength_m) / (mp.mpf(planck) * mp.mpf(light_speed))


def scattering_coefficient_per_km(visibility_km, wavelength_nm):
    v = mp.mpf(visibility_km)
    if v > 50:
        q = mp.mpf("1.6")
    elif v > 6:
        q = mp.mpf("1.3")
    else:
        q = mp.mpf("0.585") * v ** (mp.mpf(1) / 3)
    return mp.mpf("3.91") / v * (mp.mpf(wavelength_nm) / 550) ** (-q)


def path_loss(distance_m, divergence_rad, aperture_area_m2, xi_per_m):
    geometric = mp.mpf(aperture_area_m2) / (mp.mpf(divergence_rad) * mp.mpf(distance_m) / 2) ** 2
    if geometric > 1:
        geometric = mp.mpf(1)
    return geometric * mp.exp(-mp.mpf(distance_m) * mp.mpf(xi_per_m))


def rytov_variance(cn2, wavelength_m, distance_m):
    kappa = 2 * mp.pi / mp.mpf(wavelength_m)
    return mp.mpf("1.23") * mp.mpf(cn2) * kappa ** (mp.mpf(7) / 6) * mp.mpf(distance_m) ** (mp.mpf(11) / 6)


def thermal_variance(boltzmann, temp_k, t_s, load_ohm, electron_charge):
    return 2 * mp.mpf(boltzmann) * mp.mpf(temp_k) * mp.mpf(t_s) / (mp.mpf(load_ohm) * mp.mpf(electron_charge) ** 2)


def lognormal_pdf(x, mu, sigma2):
    x, mu, sigma2 = mp.mpf(x), mp.mpf(mu), mp.mpf(sigma2)
    sigma = mp.sqrt(sigma2)
    return mp.exp(-((mp.log(x) - mu) ** 2) / (2 * sigma2)) / (x * sigma * mp.sqrt(2 * mp.pi))


def laguerre_mean_var(a, b, dof):
    a, b, dof = mp.mpf(a), mp.mpf(b), mp.mpf(dof)
    return a + dof * b, a + dof * (b + b ** 2) + 2 * a * b


class Defaults:
    """Reference parameter set in base SI units."""

    wavelength = mp.mpf("1550e-9")
    visibility_km = mp.mpf("1.5")
    cn2 = mp.mpf("1e-15")
    aperture_area = mp.pi * mp.mpf("0.1") ** 2
    divergence = mp.mpf("1e-3")
    planck = mp.mpf("6.6e-34")
    boltzmann = mp.mpf("1.38e-23")
    light_speed = mp.mpf("3e8")
    electron_charge = mp.mpf("1.602176634e-19")
    receiver_load = mp.mpf(100)
    receiver_temp = mp.mpf(300)
    symbol_rate = mp.mpf("2e9")
    n_sp = mp.mpf(1)
    dof = mp.mpf(100)
    eta = mp.mpf("0.8")
    p_tx = dbm_to_watts(5)
    p_bg = mp.mpf("5e-9")
    d_sd = mp.mpf(5000)

    @classmethod
    def t_s(cls):
        return 1 / cls.symbol_rate

    @classmethod
    def photons(cls, power_w):
        return photons_per_symbol(power_w, cls.t_s(), cls.wavelength, cls.planck, cls.light_speed)

    @classmethod
    def hop(cls, distance_m):
        xi = scattering_coefficient_per_km(cls.visibility_km, cls.wavelength * mp.mpf("1e9")) / 1000
        loss = path_loss(distance_m, cls.divergence, cls.aperture_area, xi)
        rytov = rytov_variance(cls.cn2, cls.wavelength, distance_m)
        return {
            "xi": xi,
            "path_loss": loss,
            "rytov": rytov,
            "mu_l": -rytov / 8 + mp.log(loss),
            "sigma2_l": rytov / 4,
        }


def chain_at_mean_fading(d_sr, d_rr, d_rd, p_bg=None):
    """Full relay chain with every hop at its deterministic mean gain."""
    cfg = Defaults
    p_bg = cfg.p_bg if p_bg is None else mp.mpf(p_bg)
    m_s = cfg.photons(cfg.p_tx)
    m_r1 = m_r2 = m_s
    m_b = cfg.photons(p_bg)
    h1 = cfg.hop(d_sr)["path_loss"]
    h2 = cfg.hop(d_rr)["path_loss"]
    h3 = cfg.hop(d_rd)["path_loss"]
    dof, n_sp, eta = cfg.dof, cfg.n_sp, cfg.eta
    g1 = m_r1 / (m_s * h1 + dof * (m_b + n_sp))
    g2 = m_r2 / (m_r1 * h2 + dof * (m_b + n_sp))
    a = g1 * g2 * m_s * h1 * h2 * h3
    b = g1 * g2 * (m_b + n_sp) * h2 * h3 + g2 * (m_b + n_sp) * h3 + m_b
    mean, var = laguerre_mean_var(eta * a, eta * b, dof)
    thermal = thermal_variance(cfg.boltzmann, cfg.receiver_temp, cfg.t_s(),
                               cfg.receiver_load, cfg.electron_charge)
    snr = (eta * a) ** 2 / (var + thermal)
    return {
        "m_s": m_s, "m_b": m_b, "h_sr": h1, "h_rr": h2, "h_rd": h3,
        "g1": g1, "g2": g2, "a": a, "b": b,
        "mean": mean, "var_composed": var, "thermal": thermal, "snr": snr,
    }
