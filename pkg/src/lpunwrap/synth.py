"""Synthetic unwrapped-phase generators and the built-in benchmark size sweep."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .grid import MapKind, PhaseMap

# Reference resolution of the size sweep (scale 1.0), rows x cols.
REFERENCE_ROWS = 480
REFERENCE_COLS = 640

_SWEEP_SCALES = (0.25, 0.50, 0.75, 1.00, 1.25, 1.50, 1.75, 2.00)


class SynthShape(Enum):
    GAUSSIAN_PEAKS = "gaussian-peaks"
    RAMP = "ramp"
    PARABOLA = "parabola"


@dataclass(frozen=True)
class SynthSpec:
    shape: SynthShape
    rows: int
    cols: int
    amplitude: float
    seed: int = 0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise InvalidInputError(
                f"rows and cols must be >= 2, got {self.rows}x{self.cols}"
            )
        if not np.isfinite(self.amplitude):
            raise InvalidInputError("amplitude must be finite")
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma >= 0.0):
            raise InvalidInputError("noise_sigma must be finite and >= 0")


def _gaussian_peaks(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    # Three bumps with seed-drawn fractional geometry, so the same seed yields
    # the same continuous surface at every resolution. Centers stay well inside
    # the domain and sigmas small enough that the bumps decay to numerical zero
    # at the boundary (keeps boundary-edge data self-consistent).
    n_bumps = 3
    center_r = rng.uniform(0.32, 0.68, n_bumps)
    center_c = rng.uniform(0.32, 0.68, n_bumps)
    sigma_frac = rng.uniform(0.040, 0.055, n_bumps)
    rel_amp = rng.uniform(0.6, 1.0, n_bumps)
    signs = np.array([1.0, -1.0, 1.0])

    r = np.arange(spec.rows, dtype=np.float64)[:, None]
    c = np.arange(spec.cols, dtype=np.float64)[None, :]
    scale = float(min(spec.rows, spec.cols))
    phi = np.zeros((spec.rows, spec.cols))
    for b in range(n_bumps):
        sigma = sigma_frac[b] * scale
        d2 = (r - center_r[b] * (spec.rows - 1)) ** 2 + (c - center_c[b] * (spec.cols - 1)) ** 2
        phi += signs[b] * rel_amp[b] * np.exp(-d2 / (2.0 * sigma * sigma))
    ptp = phi.max() - phi.min()
    if ptp > 0.0 and spec.amplitude != 0.0:
        phi *= spec.amplitude / ptp
    else:
        phi[:] = 0.0
    return phi


def _ramp(spec: SynthSpec) -> np.ndarray:
    r = np.arange(spec.rows, dtype=np.float64)[:, None] / (spec.rows - 1)
    c = np.arange(spec.cols, dtype=np.float64)[None, :] / (spec.cols - 1)
    return spec.amplitude * 0.5 * (r + c)


def _parabola(spec: SynthSpec) -> np.ndarray:
    r0 = (spec.rows - 1) / 2.0
    c0 = (spec.cols - 1) / 2.0
    r = np.arange(spec.rows, dtype=np.float64)[:, None]
    c = np.arange(spec.cols, dtype=np.float64)[None, :]
    d2 = (r - r0) ** 2 + (c - c0) ** 2
    return spec.amplitude * d2 / d2.max()


def generate(spec: SynthSpec) -> PhaseMap:
    """Deterministic unwrapped map for the given spec; the seed fixes both the
    bump geometry (gaussian-peaks) and the additive noise draw."""
    rng = np.random.default_rng(spec.seed)
    if spec.shape is SynthShape.GAUSSIAN_PEAKS:
        phi = _gaussian_peaks(spec, rng)
    elif spec.shape is SynthShape.RAMP:
        phi = _ramp(spec)
    elif spec.shape is SynthShape.PARABOLA:
        phi = _parabola(spec)
    else:  # pragma: no cover
        raise InvalidInputError(f"unknown shape {spec.shape!r}")
    if spec.noise_sigma > 0.0:
        phi = phi + rng.normal(0.0, spec.noise_sigma, phi.shape)
    return PhaseMap(phi, MapKind.UNWRAPPED)


def scaled_size(scale: float) -> tuple[int, int]:
    """(rows, cols) for a given scale of the 480x640 reference resolution."""
    return int(round(REFERENCE_ROWS * scale)), int(round(REFERENCE_COLS * scale))


def table1_sizes() -> list[tuple[float, int, int]]:
    """The eight (scale, rows, cols) entries of the built-in size sweep."""
    return [(s, *scaled_size(s)) for s in _SWEEP_SCALES]
