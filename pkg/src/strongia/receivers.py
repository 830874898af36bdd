"""Receive-side processing: MMSE combining, zero-forcing, stream rates.

All rates returned here are bits per extended block (one block = tau
channel uses); callers normalize by 1/tau when reporting per channel
use.  Noise is unit-variance circularly-symmetric complex Gaussian per
slot throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import USERS, ExtendedChannel
from .errors import DegenerateChannelError, IllConditionedError, InvalidInputError, ShapeError
from .numerics import DEFAULT_TOL, Tolerance, orthonormal_basis, smallest_eigvecs
from .precoding import PrecoderSet

__all__ = [
    "PowerAllocation",
    "CombinerResult",
    "ZfFilter",
    "interference_covariance",
    "zf_filter",
    "mmse_combiner",
    "sinr_for_combiner",
    "stream_rates_zf",
]


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream transmit powers (linear scale) for the three users.

    ``per_stream[k, i]`` is the power of user k's stream i; each user's
    total must respect the common budget ``p_total``.
    """

    p_total: float
    per_stream: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.p_total) and self.p_total >= 0):
            raise InvalidInputError(f"p_total must be finite and >= 0, got {self.p_total}")
        ps = np.asarray(self.per_stream, dtype=float)
        if ps.ndim != 2 or ps.shape[0] != USERS:
            raise ShapeError(f"per_stream must have shape (3, n), got {ps.shape}")
        if np.any(ps < 0) or not np.all(np.isfinite(ps)):
            raise InvalidInputError("per-stream powers must be finite and nonnegative")
        budget = self.p_total * (1 + 1e-12) + 1e-12
        if np.any(ps.sum(axis=1) > budget):
            raise InvalidInputError("per-user power exceeds the total budget")
        object.__setattr__(self, "per_stream", ps)

    @classmethod
    def uniform(cls, p_total: float, n: int) -> "PowerAllocation":
        """Uniform split p_total / n on every stream of every user."""
        if n < 1:
            raise InvalidInputError(f"stream count must be >= 1, got {n}")
        return cls(p_total=p_total, per_stream=np.full((USERS, n), p_total / n))

    @property
    def n_streams(self) -> int:
        return self.per_stream.shape[1]

    def stream_power(self, user: int, stream: int) -> float:
        return float(self.per_stream[user, stream])

    def with_zeroed(self, user: int, stream: int) -> "PowerAllocation":
        """Copy with one stream's power set to zero."""
        ps = self.per_stream.copy()
        ps[user, stream] = 0.0
        return PowerAllocation(p_total=self.p_total, per_stream=ps)


@dataclass(frozen=True)
class CombinerResult:
    """MMSE combining vector, its covariance, and the achieved SINR."""

    c2: np.ndarray
    B: np.ndarray
    sinr: float


@dataclass(frozen=True)
class ZfFilter:
    """Zero-forcing projection onto the least-interfered directions.

    ``residual_leakage`` is the Frobenius norm of the filtered
    power-weighted interference (square root of the interference power
    passing the filter); near zero when interference is exactly aligned.
    """

    U: np.ndarray
    Q: np.ndarray
    residual_leakage: float


def _check_geometry(ch: ExtendedChannel, p: PrecoderSet, pa: PowerAllocation) -> None:
    if p.tau != ch.tau:
        raise ShapeError(f"precoder rows {p.tau} != extension length {ch.tau}")
    if pa.n_streams != p.n_streams:
        raise ShapeError(
            f"power allocation has {pa.n_streams} streams, precoders have {p.n_streams}"
        )


def interference_covariance(
    ch: ExtendedChannel, p: PrecoderSet, pa: PowerAllocation, rx: int
) -> np.ndarray:
    """Covariance of the interfering signals seen at receiver ``rx``.

    Sum over the other transmitters of the power-weighted outer products
    of their received beam columns.  Hermitian PSD, tau x tau.
    """
    _check_geometry(ch, p, pa)
    if not 0 <= rx < USERS:
        raise InvalidInputError(f"receiver index must be in [0, 3), got {rx}")
    q = np.zeros((ch.tau, ch.tau), dtype=complex)
    for tx in range(USERS):
        if tx == rx:
            continue
        a = ch.h[rx, tx][:, None] * p.matrices()[tx]
        q += (a * pa.per_stream[tx][None, :]) @ a.conj().T
    return 0.5 * (q + q.conj().T)


def zf_filter(q: np.ndarray, m: int, tol: Tolerance = DEFAULT_TOL) -> ZfFilter:
    """Projection onto the ``m`` least-interfered directions of covariance ``q``."""
    u = smallest_eigvecs(q, m, tol)
    leak_power = float(np.real(np.trace(u.conj().T @ q @ u)))
    return ZfFilter(U=u, Q=q, residual_leakage=float(np.sqrt(max(leak_power, 0.0))))


def _noise_plus_interference(
    ch: ExtendedChannel, p: PrecoderSet, pa: PowerAllocation, tx: int, stream: int, rx: int
) -> tuple[np.ndarray, np.ndarray]:
    """Target signature and covariance of everything else at receiver ``rx``."""
    sig = ch.h[rx, tx][:, None] * p.matrices()[tx][:, [stream]]
    others = pa.with_zeroed(tx, stream)
    b = np.eye(ch.tau, dtype=complex)
    for k in range(USERS):
        a = ch.h[rx, k][:, None] * p.matrices()[k]
        b += (a * others.per_stream[k][None, :]) @ a.conj().T
    return sig[:, 0], 0.5 * (b + b.conj().T)


def mmse_combiner(
    ch: ExtendedChannel,
    p: PrecoderSet,
    pa: PowerAllocation,
    tx: int,
    stream: int,
    rx: int = 1,
) -> CombinerResult:
    """SINR-maximizing combiner for one stream treated as the decode target.

    All other streams, including the receiver's own desired signal, plus
    unit-variance noise form the covariance ``B``; the optimal combiner
    is the whitened signature ``B^-1 g`` normalized to unit norm, and the
    achieved SINR is ``p * g^H B^-1 g``.
    """
    _check_geometry(ch, p, pa)
    if not (0 <= tx < USERS and 0 <= rx < USERS):
        raise InvalidInputError(f"user indices must be in [0, 3), got tx={tx}, rx={rx}")
    if not 0 <= stream < p.n_streams:
        raise InvalidInputError(f"stream must be in [0, {p.n_streams}), got {stream}")
    g, b = _noise_plus_interference(ch, p, pa, tx, stream, rx)
    try:
        whitened = np.linalg.solve(b, g)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("noise-plus-interference covariance is singular") from exc
    norm = np.linalg.norm(whitened)
    if norm == 0:
        raise IllConditionedError("combiner collapsed to zero")
    sinr = pa.stream_power(tx, stream) * float(np.real(g.conj() @ whitened))
    return CombinerResult(c2=whitened / norm, B=b, sinr=max(sinr, 0.0))


def sinr_for_combiner(
    ch: ExtendedChannel,
    p: PrecoderSet,
    pa: PowerAllocation,
    tx: int,
    stream: int,
    c: np.ndarray,
    rx: int = 1,
) -> float:
    """SINR of an arbitrary combining vector against the same covariance."""
    g, b = _noise_plus_interference(ch, p, pa, tx, stream, rx)
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.shape[0] != ch.tau:
        raise ShapeError(f"combiner length {c.shape[0]} != extension length {ch.tau}")
    num = pa.stream_power(tx, stream) * float(np.abs(c.conj() @ g) ** 2)
    den = float(np.real(c.conj() @ b @ c))
    return num / den


def stream_rates_zf(
    ch: ExtendedChannel,
    p: PrecoderSet,
    pa: PowerAllocation,
    rx: int,
    zf: ZfFilter,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Per-stream rates of user ``rx`` after projection and ZF equalization.

    Projects the received block onto the filter's columns, then inverts
    the effective matrix of the actively powered streams; residual
    interference is excluded by assumption (exact alignment).  Streams
    with zero power get rate zero.  Bits per extended block.
    """
    _check_geometry(ch, p, pa)
    n = p.n_streams
    powers = pa.per_stream[rx]
    rates = np.zeros(n)
    active = np.flatnonzero(powers > 0)
    if active.size == 0:
        return rates
    u = zf.U
    if u.shape[0] != ch.tau:
        raise ShapeError(f"filter rows {u.shape[0]} != extension length {ch.tau}")
    if active.size > u.shape[1]:
        raise DegenerateChannelError(
            f"{active.size} active streams need at least that many filter dimensions, got {u.shape[1]}"
        )
    g = u.conj().T @ (ch.h[rx, rx][:, None] * p.matrices()[rx][:, active])
    if orthonormal_basis(g, tol).dim < active.size:
        raise DegenerateChannelError("effective desired channel is rank deficient")
    gram = g.conj().T @ g
    noise_var = np.real(np.diag(np.linalg.inv(gram)))
    rates[active] = np.log2(1.0 + powers[active] / noise_var)
    return rates
