"""Phase-map container, wrapping operator, and wrapped finite-difference gradients."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi


class MapKind(Enum):
    WRAPPED = "wrapped"
    UNWRAPPED = "unwrapped"


def wrap_scalar(x: float) -> float:
    """Reduce ``x`` to its principal value in (-pi, pi].

    Subtracts the nearest integer multiple of 2*pi (IEEE remainder, so the
    subtraction is exact), then bumps a result of exactly -pi up to +pi so the
    half-open interval convention holds.
    """
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"wrap_scalar requires a finite value, got {x!r}")
    w = math.remainder(x, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    return w


def wrap_array(values: np.ndarray) -> np.ndarray:
    """Elementwise principal value in (-pi, pi] for an array of finite radians."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("wrap requires finite values")
    w = values - TWO_PI * np.round(values / TWO_PI)
    # round-half-even can leave results on the excluded boundary
    w[w <= -math.pi] += TWO_PI
    w[w > math.pi] -= TWO_PI
    return w


@dataclass
class PhaseMap:
    """Dense grid of phase values in radians, row-major, wrapped or unwrapped."""

    values: np.ndarray
    kind: MapKind

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise InvalidInputError("phase map values must be a 2-D array")
        rows, cols = self.values.shape
        if rows < 2 or cols < 2:
            raise InvalidInputError(f"phase map must be at least 2x2, got {rows}x{cols}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("phase map values must all be finite")
        if self.kind is MapKind.WRAPPED:
            bad = (self.values > math.pi) | (self.values <= -math.pi)
            if np.any(bad):
                r, c = np.argwhere(bad)[0]
                raise InvalidInputError(
                    f"wrapped phase map value {self.values[r, c]!r} at ({r}, {c}) "
                    "is outside (-pi, pi]"
                )
        self.values.flags.writeable = False

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass
class GradientField:
    """Wrapped neighbor differences of a wrapped map.

    ``dx`` holds the horizontal-edge values (shape rows x cols-1), ``dy`` the
    vertical-edge values (shape rows-1 x cols); every entry lies in (-pi, pi].
    """

    dx: np.ndarray
    dy: np.ndarray

    def __post_init__(self):
        self.dx = np.asarray(self.dx, dtype=np.float64)
        self.dy = np.asarray(self.dy, dtype=np.float64)
        self.dx.flags.writeable = False
        self.dy.flags.writeable = False

    @property
    def rows(self) -> int:
        return self.dx.shape[0]

    @property
    def cols(self) -> int:
        return self.dy.shape[1]


def wrap_map(phi: PhaseMap) -> PhaseMap:
    """Wrap an unwrapped map elementwise into (-pi, pi]."""
    if phi.kind is not MapKind.UNWRAPPED:
        raise InvalidInputError("wrap_map expects an unwrapped map")
    return PhaseMap(wrap_array(phi.values), MapKind.WRAPPED)


def wrapped_gradients(psi: PhaseMap) -> GradientField:
    """Wrapped forward differences of a wrapped map, with the backward-difference
    fallback on the last edge column (for dx) and last edge row (for dy).

    With 3 or more columns the final dx column repeats the preceding wrapped
    difference (the backward difference at that position); a 2-column map has a
    single difference and keeps it. Same rule transposed for dy.
    """
    if psi.kind is not MapKind.WRAPPED:
        raise InvalidInputError("wrapped_gradients expects a wrapped map")
    v = psi.values
    if v.shape[0] < 2 or v.shape[1] < 2:
        raise InvalidInputError("wrapped_gradients requires a map of at least 2x2")
    dx = wrap_array(v[:, 1:] - v[:, :-1])
    dy = wrap_array(v[1:, :] - v[:-1, :])
    if dx.shape[1] >= 2:
        dx[:, -1] = dx[:, -2]
    if dy.shape[0] >= 2:
        dy[-1, :] = dy[-2, :]
    return GradientField(dx, dy)
