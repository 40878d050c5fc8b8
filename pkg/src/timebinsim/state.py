"""Sparse single-photon states over channels, polarizations, and time bins.

A photon is described by a finite map from modes to complex amplitudes.
A mode is a (channel, polarization, tick) triple; ticks are integers on a
grid whose unit is half the base interferometer interval, so every delay
in a circuit is an exact integer and no rounding ever occurs.

All operations are pure: they return new states and never mutate inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

#: Amplitudes with magnitude below this are dropped from the sparse map.
PRUNE_THRESHOLD = 1e-15

#: Default tolerance for float comparisons throughout the package.
TOLERANCE = 1e-12


class Polarization(str, Enum):
    H = "H"
    V = "V"

    def flipped(self) -> "Polarization":
        return Polarization.V if self is Polarization.H else Polarization.H


H = Polarization.H
V = Polarization.V


class Mode(NamedTuple):
    """Addressable basis element: where, which polarization, and when."""

    channel: str
    pol: Polarization
    tick: int

    def sort_key(self) -> tuple[str, int, str]:
        # Total order is channel, then tick, then polarization.
        return (self.channel, self.tick, self.pol.value)


def _mode_key(mode: tuple) -> tuple[str, int, str]:
    channel, pol, tick = mode
    return (channel, tick, pol.value)


@dataclass(frozen=True)
class QubitSpec:
    """Polarization qubit a|H> + b|V>, normalized to one."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > TOLERANCE:
            raise ValueError(f"qubit amplitudes not normalized: |a|^2+|b|^2 = {n!r}")

    @staticmethod
    def horizontal() -> "QubitSpec":
        return QubitSpec(1.0, 0.0)

    @staticmethod
    def vertical() -> "QubitSpec":
        return QubitSpec(0.0, 1.0)

    @staticmethod
    def diagonal() -> "QubitSpec":
        s = 1.0 / math.sqrt(2.0)
        return QubitSpec(s, s)

    @staticmethod
    def antidiagonal() -> "QubitSpec":
        s = 1.0 / math.sqrt(2.0)
        return QubitSpec(s, -s)


def random_qubit(rng) -> QubitSpec:
    """Draw a uniformly random pure qubit from a numpy Generator."""
    raw = rng.normal(size=4)
    alpha = complex(raw[0], raw[1])
    beta = complex(raw[2], raw[3])
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return QubitSpec(alpha / norm, beta / norm)


class PhotonState:
    """Finite map mode -> complex amplitude.

    The map is kept sparse: entries below ``PRUNE_THRESHOLD`` in magnitude
    are dropped on construction. Treat instances as immutable values; all
    transformations produce new states.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: dict | None = None):
        amps = {}
        if amplitudes:
            for mode, a in amplitudes.items():
                if type(a) is not complex:
                    a = complex(a)
                if abs(a) >= PRUNE_THRESHOLD:
                    channel, pol, tick = mode
                    if type(pol) is not Polarization:
                        mode = (channel, Polarization(pol), int(tick))
                    amps[mode] = a
        self.amplitudes = amps

    @classmethod
    def _from_clean(cls, amplitudes: dict) -> "PhotonState":
        # Internal fast path: keys are known-good (str, Polarization, int)
        # tuples, values complex; only pruning is applied.
        state = cls.__new__(cls)
        state.amplitudes = {m: a for m, a in amplitudes.items() if abs(a) >= PRUNE_THRESHOLD}
        return state

    def __repr__(self):
        return f"PhotonState({len(self.amplitudes)} modes, norm_sq={self.norm_sq():.6g})"

    def __len__(self):
        return len(self.amplitudes)

    def amplitude(self, channel: str, pol: Polarization, tick: int) -> complex:
        return self.amplitudes.get((channel, Polarization(pol), tick), 0j)

    def channels(self) -> set[str]:
        return {m[0] for m in self.amplitudes}

    def modes(self) -> list[Mode]:
        """The occupied modes in their total order."""
        return sorted((Mode(*m) for m in self.amplitudes), key=Mode.sort_key)

    def norm_sq(self) -> float:
        """Total probability carried by the state; 0 for the empty state."""
        return sum(a.real * a.real + a.imag * a.imag for a in self.amplitudes.values())

    def restrict(self, channel: str, window: tuple[int, int]) -> "PhotonState":
        """Sub-state on one channel within an inclusive tick window."""
        lo, hi = window
        return PhotonState._from_clean(
            {m: a for m, a in self.amplitudes.items() if m[0] == channel and lo <= m[2] <= hi}
        )

    def allclose(self, other: "PhotonState", tol: float = TOLERANCE) -> bool:
        return self.max_deviation(other) <= tol

    def max_deviation(self, other: "PhotonState") -> float:
        """Largest amplitude difference between two states, over all modes."""
        keys = set(self.amplitudes) | set(other.amplitudes)
        return max(
            (abs(self.amplitudes.get(k, 0j) - other.amplitudes.get(k, 0j)) for k in keys),
            default=0.0,
        )

    def dump(self) -> str:
        """Deterministic text dump, one mode per line: channel,pol,tick,re,im."""
        lines = []
        for mode in sorted(self.amplitudes, key=_mode_key):
            channel, pol, tick = mode
            a = self.amplitudes[mode]
            lines.append(f"{channel},{pol.value},{tick},{a.real:.17g},{a.imag:.17g}")
        return "\n".join(lines)


def new_state(qubit: QubitSpec, channel: str = "in") -> PhotonState:
    """Place a polarization qubit at tick 0 of a channel."""
    return PhotonState(
        {
            (channel, H, 0): qubit.alpha,
            (channel, V, 0): qubit.beta,
        }
    )


def norm_sq(state: PhotonState) -> float:
    return state.norm_sq()


def restrict(state: PhotonState, channel: str, window: tuple[int, int]) -> PhotonState:
    return state.restrict(channel, window)


def qubit_amplitudes(state: PhotonState) -> tuple[complex, complex]:
    """Read a state confined to one (channel, tick) as an (H, V) pair.

    Raises ValueError if the state spans more than one channel or tick,
    since no single conditional qubit exists in that case.
    """
    spots = {(m[0], m[2]) for m in state.amplitudes}
    if len(spots) > 1:
        raise ValueError(f"state spans {len(spots)} (channel, tick) slots, expected one")
    a_h = 0j
    a_v = 0j
    for (_, pol, _tick), a in state.amplitudes.items():
        if pol is H:
            a_h = a
        else:
            a_v = a
    return a_h, a_v


def fidelity_with_qubit(state: PhotonState, qubit: QubitSpec) -> float:
    """Overlap |<q|s>|^2 of a single-slot state, renormalized, with a qubit.

    Invariant under global phase of either argument. Zero-norm input is an
    error: there is no conditional state to compare.
    """
    a_h, a_v = qubit_amplitudes(state)
    n = abs(a_h) ** 2 + abs(a_v) ** 2
    if n <= 0.0:
        raise ValueError("cannot take fidelity of a zero-norm state")
    overlap = qubit.alpha.conjugate() * a_h + qubit.beta.conjugate() * a_v
    return abs(overlap) ** 2 / n


def superpose(*weighted: tuple[complex, PhotonState]) -> PhotonState:
    """Linear combination sum(c_i * s_i) of states."""
    amps: dict = {}
    for coeff, state in weighted:
        for mode, a in state.amplitudes.items():
            amps[mode] = amps.get(mode, 0j) + coeff * a
    return PhotonState(amps)


def random_state(rng, channels: Iterable[str], ticks: range, modes: int) -> PhotonState:
    """Random normalized state on the given channels/ticks, for property tests."""
    channels = list(channels)
    amps: dict = {}
    while len(amps) < modes:
        ch = channels[int(rng.integers(len(channels)))]
        pol = H if rng.integers(2) == 0 else V
        tick = int(rng.integers(ticks.start, ticks.stop))
        amps[(ch, pol, tick)] = complex(rng.normal(), rng.normal())
    norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    return PhotonState({m: a / norm for m, a in amps.items()})
