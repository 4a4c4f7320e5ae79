"""Scalar envelopes for the interferometric scans.

The exact Fock-space rates describe perfect wavepacket overlap. Moving a
beam splitter or mirror introduces a relative delay that washes the
interference out; this module models that washout with Gaussian envelopes
parameterized by the filter passband and the pump pulse length.

Units: lengths in nanometers of optical path, times in femtoseconds.
A mirror moved by d changes the optical path by 2d; callers working in
mirror coordinates apply that factor before calling in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT_NM_PER_FS = 299.792458

_FOUR_LN2 = 4.0 * math.log(2.0)

# Converts the raw filter estimate lambda^2 / (c * passband) into the
# observed photon coherence time. Calibrated once so the default 795 nm
# signal behind a 2 nm filter comes out at 225 fs, and frozen; the common
# Gaussian-filter conventions would give 2 to 4.7 times longer.
DEFAULT_FILTER_CALIBRATION = 225.0 * SPEED_OF_LIGHT_NM_PER_FS * 2.0 / 795.0**2


@dataclass(frozen=True)
class TemporalParams:
    """Wavelengths, filter width, pump length and fringe contrast.

    wavelength and pump_wavelength are vacuum wavelengths in nm,
    filter_fwhm the interference-filter passband FWHM in nm,
    pump_coherence the pump pulse coherence time in fs, visibility the
    first-order fringe contrast in [0, 1].
    """

    wavelength: float = 795.0
    pump_wavelength: float = 397.5
    filter_fwhm: float = 2.0
    pump_coherence: float = 180.0
    visibility: float = 0.4
    filter_calibration: float = DEFAULT_FILTER_CALIBRATION

    def __post_init__(self) -> None:
        for name in ("wavelength", "pump_wavelength", "filter_fwhm", "pump_coherence"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")

    @property
    def coherence_time(self) -> float:
        return coherence_time_from_filter(self)


def coherence_time_from_filter(p: TemporalParams) -> float:
    """Photon coherence time in fs set by the interference filter.

    Scales as wavelength squared over (c times passband); the calibration
    prefactor is a configuration value, not derived.
    """
    raw = p.wavelength**2 / (SPEED_OF_LIGHT_NM_PER_FS * p.filter_fwhm)
    return p.filter_calibration * raw


def _gaussian(delay_fs: float, fwhm_fs: float) -> float:
    return math.exp(-_FOUR_LN2 * (delay_fs / fwhm_fs) ** 2)


def x_scan_envelope(
    x: float, p: TemporalParams, baseline: float, extremum: float
) -> float:
    """Coincidence rate vs beam-splitter path offset x (nm).

    Interpolates between the zero-delay rate (extremum, weighted by the
    visibility) and the distinguishable-path rate (baseline) under a
    Gaussian whose FWHM in delay units is the photon coherence time. A
    below-baseline extremum gives a dip, an above-baseline one a peak.
    """
    delay = x / SPEED_OF_LIGHT_NM_PER_FS
    env = _gaussian(delay, coherence_time_from_filter(p))
    return baseline + (extremum - baseline) * p.visibility * env


def z_fringe(z: float, p: TemporalParams) -> float:
    """First-order fringe vs mirror path offset z (nm), normalized to 1.

    Oscillates with period equal to the signal wavelength in optical path,
    under a Gaussian envelope whose delay FWHM is the pump coherence time
    (the injected photon must stay inside the pump pulse to interfere).
    Bounded in [1 - V, 1 + V].
    """
    delay = z / SPEED_OF_LIGHT_NM_PER_FS
    env = _gaussian(delay, p.pump_coherence)
    return 1.0 + p.visibility * env * math.cos(2.0 * math.pi * z / p.wavelength)


def z_peak_envelope(
    z: float, p: TemporalParams, baseline: float, peak: float
) -> float:
    """Amplification signal vs mirror path offset z (nm).

    The stimulated contribution needs the injected photon inside the pump
    pulse, so the zero-delay peak decays to the spontaneous baseline under
    the same pump-width Gaussian as the first-order fringe envelope.
    """
    delay = z / SPEED_OF_LIGHT_NM_PER_FS
    return baseline + (peak - baseline) * _gaussian(delay, p.pump_coherence)
