"""
Beamspace primitives for half-wavelength uniform linear arrays.

Steering vectors, unitary DFT codebooks, the angle-to-bin map used by the
featurizer, and assembly of the narrowband MIMO channel and its beamspace
(effective) form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyPathList

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 28e9


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array. Spacing and wavelength in meters."""

    num_elements: int
    element_spacing: float = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ / 2
    wavelength: float = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError(f"num_elements must be a positive integer, got {self.num_elements}")
        if not self.element_spacing > 0:
            raise ValueError("element_spacing must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @classmethod
    def half_wavelength(cls, num_elements: int, frequency: float = DEFAULT_CARRIER_HZ) -> "ArrayConfig":
        wavelength = SPEED_OF_LIGHT / frequency
        return cls(num_elements, wavelength / 2, wavelength)


@dataclass(frozen=True)
class BeamspaceCodebook:
    array: ArrayConfig
    columns: np.ndarray

    @property
    def size(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class ComplexChannel:
    matrix: np.ndarray
    frequency: float


def steering_vector(array: ArrayConfig, angle: float) -> np.ndarray:
    """Unit-norm array response toward ``angle`` (radians from broadside)."""
    k = np.arange(array.num_elements)
    phase = 2 * np.pi / array.wavelength * array.element_spacing * np.sin(angle)
    return np.exp(1j * k * phase) / np.sqrt(array.num_elements)


def dft_codebook(array: ArrayConfig) -> BeamspaceCodebook:
    """Unitary DFT matrix; column ``n`` has entries exp(j 2 pi k n / N) / sqrt(N)."""
    n = array.num_elements
    k = np.arange(n)
    columns = np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    return BeamspaceCodebook(array, columns)


def angle_to_bin(num_bins: int, angle) -> np.ndarray | int:
    """Index of the DFT column whose spatial frequency is nearest the path's.

    Uses ``round(N sin(angle) / 2) mod N`` with ties to even, which is the
    column match for half-wavelength spacing. Accepts scalars or arrays.
    """
    bins = np.mod(np.rint(num_bins * np.sin(angle) / 2.0), num_bins).astype(np.int64)
    if np.ndim(bins) == 0:
        return int(bins)
    return bins


def path_gains(rss_db: Sequence[float], rng: np.random.Generator) -> np.ndarray:
    """Complex path coefficients with magnitude 10^(rss/20) and uniform random phase."""
    rss_db = np.asarray(rss_db, dtype=float)
    phase = rng.uniform(0.0, 2 * np.pi, size=rss_db.shape)
    return 10 ** (rss_db / 20) * np.exp(1j * phase)


def assemble_channel(
    paths,
    bs_array: ArrayConfig,
    ms_array: ArrayConfig,
    frequency: float,
    gains: Optional[Sequence[complex]] = None,
    rng: Optional[np.random.Generator] = None,
) -> ComplexChannel:
    """Sum of rank-one path contributions a_BS(aoa) a_MS(aod)^H exp(j 2 pi f tau).

    Args:
        paths: objects exposing ``rss_db``, ``delay_s``, ``aoa_rad``, ``aod_rad``.
        bs_array, ms_array: array geometry at each end.
        frequency: evaluation frequency in Hz.
        gains: complex coefficients, one per path. When omitted, gains are
            built from the stored RSS with phases drawn from ``rng``.
        rng: generator for the phase draw (defaults to seed 0).
    """
    paths = list(paths)
    if not paths:
        raise EmptyPathList("cannot assemble a channel from zero paths")
    if gains is None:
        rng = np.random.default_rng(0) if rng is None else rng
        gains = path_gains([p.rss_db for p in paths], rng)
    gains = np.asarray(gains, dtype=complex)
    if gains.shape != (len(paths),):
        raise DimensionMismatch(f"expected {len(paths)} gains, got shape {gains.shape}")

    h = np.zeros((bs_array.num_elements, ms_array.num_elements), dtype=complex)
    for alpha, p in zip(gains, paths):
        a_bs = steering_vector(bs_array, p.aoa_rad)
        a_ms = steering_vector(ms_array, p.aod_rad)
        h += alpha * np.outer(a_bs, a_ms.conj()) * np.exp(2j * np.pi * frequency * p.delay_s)
    return ComplexChannel(h, frequency)


def effective_channel(
    channel: ComplexChannel | np.ndarray,
    bs_codebook: BeamspaceCodebook,
    ms_codebook: BeamspaceCodebook,
) -> np.ndarray:
    """Beamspace channel W_BS^H H W_MS."""
    h = channel.matrix if isinstance(channel, ComplexChannel) else np.asarray(channel)
    w_bs, w_ms = bs_codebook.columns, ms_codebook.columns
    if h.ndim != 2 or h.shape[0] != w_bs.shape[0] or h.shape[1] != w_ms.shape[0]:
        raise DimensionMismatch(
            f"channel {h.shape} incompatible with codebooks {w_bs.shape} and {w_ms.shape}"
        )
    return w_bs.conj().T @ h @ w_ms
