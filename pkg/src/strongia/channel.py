"""Seeded generation of symbol-extended 3-user channels.

One realization is the set of nine tau x tau diagonal channel matrices of
a tau-slot symbol extension, stored as a (3, 3, tau) array of diagonals
indexed ``h[rx, tx, slot]`` (0-based users).  Coefficients are drawn
i.i.d. per slot from a circularly-symmetric complex Gaussian, optionally
conditioned on a magnitude window by rejection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError, SingularChannelError

__all__ = [
    "USERS",
    "ExtensionConfig",
    "GainModel",
    "ExtendedChannel",
    "AlignmentOperator",
    "draw_channel",
    "alignment_operator",
    "apply_gain_boost",
    "dump_channels",
    "load_channels",
]

USERS = 3

# resampling guard for pathologically narrow magnitude windows
_MAX_REJECTION_TRIES = 100_000


@dataclass(frozen=True)
class ExtensionConfig:
    """Symbol-extension geometry: n streams per user over tau = 2n slots."""

    n: int

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")

    @property
    def tau(self) -> int:
        return 2 * self.n

    @property
    def users(self) -> int:
        return USERS


@dataclass(frozen=True)
class GainModel:
    """Distribution of a single channel coefficient.

    ``gaussian``: unit-variance circularly-symmetric complex Gaussian.
    ``bounded``: the same law conditioned on h_min <= |h| <= h_max by
    rejection, which keeps the phase circularly symmetric.
    """

    kind: str = "gaussian"
    h_min: float = 0.1
    h_max: float = 10.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bounded"):
            raise ConfigError(f"unknown gain model kind {self.kind!r}")
        if self.kind == "bounded":
            if not (0 < self.h_min < self.h_max < np.inf):
                raise ConfigError(
                    f"bounded model needs 0 < h_min < h_max < inf, got [{self.h_min}, {self.h_max}]"
                )

    @classmethod
    def gaussian(cls) -> "GainModel":
        return cls(kind="gaussian")

    @classmethod
    def bounded(cls, h_min: float, h_max: float) -> "GainModel":
        return cls(kind="bounded", h_min=h_min, h_max=h_max)


@dataclass(frozen=True)
class ExtendedChannel:
    """One realization: diagonals of the nine extended channel matrices.

    ``h[rx, tx, slot]`` is the coefficient from transmitter ``tx`` to
    receiver ``rx`` at extension slot ``slot`` (all 0-based).
    """

    h: np.ndarray
    seed: int
    index: int

    def __post_init__(self):
        a = np.asarray(self.h, dtype=complex)
        if a.ndim != 3 or a.shape[0] != USERS or a.shape[1] != USERS:
            raise InvalidInputError(f"h must have shape (3, 3, tau), got {a.shape}")
        if not np.all(np.isfinite(a.view(float))):
            raise InvalidInputError("channel contains non-finite coefficients")
        object.__setattr__(self, "h", a)

    @property
    def tau(self) -> int:
        return self.h.shape[2]

    def link_matrix(self, rx: int, tx: int) -> np.ndarray:
        """Full tau x tau diagonal matrix of one link."""
        return np.diag(self.h[rx, tx])


@dataclass(frozen=True)
class AlignmentOperator:
    """Diagonal operator whose powers generate the precoder columns."""

    diag: np.ndarray

    @property
    def tau(self) -> int:
        return self.diag.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag)


def _draw_coefficient(seed: int, index: int, rx: int, tx: int, slot: int, gm: GainModel) -> complex:
    # one child stream per (seed, realization, link, slot): parallel
    # generation over any of those axes is order-independent
    rg = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, rx, tx, slot)))
    for _ in range(_MAX_REJECTION_TRIES):
        re, im = rg.standard_normal(2)
        value = complex(re, im) / np.sqrt(2.0)
        mag = abs(value)
        if gm.kind == "gaussian":
            if mag > 0.0:
                return value
        elif gm.h_min <= mag <= gm.h_max:
            return value
    raise ConfigError(
        f"magnitude window [{gm.h_min}, {gm.h_max}] rejected {_MAX_REJECTION_TRIES} draws"
    )


def draw_channel(cfg: ExtensionConfig, gm: GainModel, seed: int, index: int) -> ExtendedChannel:
    """Draw one seeded channel realization.

    Deterministic function of ``(seed, index)`` for a fixed configuration.
    """
    if index < 0:
        raise InvalidInputError(f"realization index must be >= 0, got {index}")
    tau = cfg.tau
    h = np.empty((USERS, USERS, tau), dtype=complex)
    for rx in range(USERS):
        for tx in range(USERS):
            for slot in range(tau):
                h[rx, tx, slot] = _draw_coefficient(seed, index, rx, tx, slot, gm)
    return ExtendedChannel(h=h, seed=seed, index=index)


def alignment_operator(ch: ExtendedChannel) -> AlignmentOperator:
    """Diagonal alignment operator of one realization.

    Slot-wise product of the six cross-link gains,
    ``h[1,2] * h[0,1] * h[2,0] / (h[0,2] * h[1,0] * h[2,1])``.
    """
    h = ch.h
    denom_links = ((0, 2), (1, 0), (2, 1))
    for rx, tx in denom_links:
        if np.any(h[rx, tx] == 0):
            raise SingularChannelError(f"link ({rx}, {tx}) has a zero diagonal entry")
    diag = h[1, 2] * h[0, 1] * h[2, 0] / (h[0, 2] * h[1, 0] * h[2, 1])
    return AlignmentOperator(diag=diag)


def apply_gain_boost(ch: ExtendedChannel, boosts: dict[tuple[int, int], float]) -> ExtendedChannel:
    """Scale selected links of a realization by fixed factors.

    ``boosts`` maps 0-based ``(rx, tx)`` pairs to positive scale factors.
    Used by experiments to force or deny the strong-interference
    condition on a chosen cross link.
    """
    h = ch.h.copy()
    for (rx, tx), factor in boosts.items():
        if not (0 <= rx < USERS and 0 <= tx < USERS):
            raise InvalidInputError(f"link ({rx}, {tx}) out of range")
        if not (np.isfinite(factor) and factor > 0):
            raise InvalidInputError(f"boost factor must be finite and positive, got {factor}")
        h[rx, tx] *= factor
    return ExtendedChannel(h=h, seed=ch.seed, index=ch.index)


def dump_channels(channels, path) -> None:
    """Write realizations as text records for golden-file regression.

    One line per realization: ``seed,index`` followed by the 9*tau
    coefficients as ``re,im`` pairs in row-major (rx, tx, slot) order.
    ``repr`` formatting keeps the round trip bit exact.
    """
    with open(path, "w") as fh:
        for ch in channels:
            parts = [str(ch.seed), str(ch.index)]
            for rx in range(USERS):
                for tx in range(USERS):
                    for slot in range(ch.tau):
                        value = ch.h[rx, tx, slot]
                        parts.append(repr(float(value.real)))
                        parts.append(repr(float(value.imag)))
            fh.write(",".join(parts) + "\n")


def load_channels(path) -> list[ExtendedChannel]:
    """Read realizations written by :func:`dump_channels`."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            seed, index = int(fields[0]), int(fields[1])
            flat = np.asarray([float(x) for x in fields[2:]])
            if flat.size % (2 * USERS * USERS) != 0:
                raise InvalidInputError(f"malformed channel record with {flat.size} values")
            tau = flat.size // (2 * USERS * USERS)
            values = flat[0::2] + 1j * flat[1::2]
            out.append(
                ExtendedChannel(h=values.reshape(USERS, USERS, tau), seed=seed, index=index)
            )
    return out
