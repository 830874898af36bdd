"""Strong-interference decision, SIC, and per-user rate accounting.

The scheme decodes one interfering stream (the droppable column of the
aligned precoder chain) at receiver 2, subtracts it, and zero-forces the
rest everywhere, giving every user n streams over 2n channel uses.  When
the strong-interference condition fails, the same precoders run in a
linear mode where user 2 gives up one stream: (n1, n1-1, n1) streams
over 2n1 uses.

All reported rates are bits per channel use (per-block rates divided by
the extension length).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ExtendedChannel
from .errors import DegenerateChannelError, InvalidInputError
from .numerics import DEFAULT_TOL, Tolerance
from .precoding import PrecoderSet, build_precoders, verify_alignment
from .receivers import (
    PowerAllocation,
    interference_covariance,
    mmse_combiner,
    stream_rates_zf,
    zf_filter,
)

__all__ = [
    "StrongDecision",
    "SchemeResult",
    "STRONG_IA",
    "LINEAR_FALLBACK",
    "cross_decode_rate",
    "own_decode_rate",
    "evaluate_condition",
    "sic_subtract",
    "run_strong_ia",
    "run_linear_fallback",
]

STRONG_IA = "strong-ia"
LINEAR_FALLBACK = "linear-fallback"

# candidate strong transmitters: user 3's droppable stream first, then
# user 1's first stream
_CANDIDATE_TX = (2, 0)


@dataclass(frozen=True)
class StrongDecision:
    """Outcome of the strong-interference test over a realization set.

    ``cross_rate`` is the candidate stream's ergodic rate decoded at
    receiver 2, ``own_rate`` its rate at the intended receiver, both in
    bits per channel use.  ``strong_user`` (0-based transmitter index)
    is present exactly when the condition is satisfied; the reported
    numbers always describe the best candidate.
    """

    satisfied: bool
    strong_user: int | None
    strong_stream: int
    cross_rate: float
    own_rate: float
    margin: float
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "strong_user": self.strong_user,
            "strong_stream": self.strong_stream,
            "cross_rate": self.cross_rate,
            "own_rate": self.own_rate,
            "margin": self.margin,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class SchemeResult:
    """Averaged per-user rates of one scheme over a realization set."""

    scheme: str
    rates: np.ndarray
    sum_rate: float
    dof_streams: tuple[int, int, int]
    block_length: int
    decision: StrongDecision | None = None
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "rates": [float(r) for r in self.rates],
            "sum_rate": self.sum_rate,
            "dof_streams": list(self.dof_streams),
            "block_length": self.block_length,
            "decision": self.decision.to_dict() if self.decision is not None else None,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class _Prepared:
    """Per-realization precoders ready for rate computation."""

    ch: ExtendedChannel
    raw: PrecoderSet
    norm: PrecoderSet
    droppable: int


def _infer_streams(realizations) -> int:
    if not realizations:
        raise InvalidInputError("realization set must be nonempty")
    tau = realizations[0].tau
    if tau % 2 != 0:
        raise InvalidInputError(f"extension length must be even, got {tau}")
    return tau // 2


def _prepare_all(realizations, n: int, tol: Tolerance, w) -> tuple[list[_Prepared], int]:
    prepared = []
    skipped = 0
    for ch in realizations:
        try:
            raw = build_precoders(ch, n, w=w, tol=tol)
            report = verify_alignment(ch, raw, tol)
            if report.droppable_index is None:
                raise DegenerateChannelError("no droppable stream found")
            prepared.append(
                _Prepared(ch=ch, raw=raw, norm=raw.normalized(), droppable=report.droppable_index)
            )
        except DegenerateChannelError:
            skipped += 1
    if not prepared:
        raise DegenerateChannelError("all realizations degenerate")
    return prepared, skipped


def _candidate_stream(prep: _Prepared, tx: int) -> int:
    if tx == 2:
        return prep.droppable
    if tx == 0:
        return 0
    raise InvalidInputError(f"strong transmitter must be 0 or 2, got {tx}")


def _cross_rate(prep: _Prepared, pa: PowerAllocation, tx: int) -> float:
    stream = _candidate_stream(prep, tx)
    res = mmse_combiner(prep.ch, prep.norm, pa, tx=tx, stream=stream, rx=1)
    return float(np.log2(1.0 + res.sinr)) / prep.ch.tau


def _own_rate(prep: _Prepared, pa: PowerAllocation, tx: int) -> float:
    stream = _candidate_stream(prep, tx)
    n = prep.norm.n_streams
    q = interference_covariance(prep.ch, prep.norm, pa, rx=tx)
    rates = stream_rates_zf(prep.ch, prep.norm, pa, rx=tx, zf=zf_filter(q, n))
    return float(rates[stream]) / prep.ch.tau


def cross_decode_rate(realizations, pa: PowerAllocation, tx: int, tol: Tolerance = DEFAULT_TOL, w=None) -> float:
    """Ergodic rate of transmitter ``tx``'s strong-candidate stream at receiver 2.

    The candidate is the droppable stream for transmitter 2 (0-based)
    and the first stream for transmitter 0.  Bits per channel use,
    averaged over realizations; degenerate realizations are skipped.
    """
    n = _infer_streams(realizations)
    prepared, _ = _prepare_all(realizations, n, tol, w)
    return float(np.mean([_cross_rate(prep, pa, tx) for prep in prepared]))


def own_decode_rate(realizations, pa: PowerAllocation, tx: int, tol: Tolerance = DEFAULT_TOL, w=None) -> float:
    """Ergodic rate of the same candidate stream at its intended receiver.

    Zero-forcing of the aligned interference, bits per channel use.
    """
    n = _infer_streams(realizations)
    prepared, _ = _prepare_all(realizations, n, tol, w)
    return float(np.mean([_own_rate(prep, pa, tx) for prep in prepared]))


def _decide(prepared, pa: PowerAllocation, skipped: int) -> StrongDecision:
    best = None
    for tx in _CANDIDATE_TX:
        cross = float(np.mean([_cross_rate(prep, pa, tx) for prep in prepared]))
        own = float(np.mean([_own_rate(prep, pa, tx) for prep in prepared]))
        margin = cross - own
        stream = _candidate_stream(prepared[0], tx)
        if best is None or margin > best[0]:
            best = (margin, tx, stream, cross, own)
    margin, tx, stream, cross, own = best
    satisfied = margin >= 0
    return StrongDecision(
        satisfied=satisfied,
        strong_user=tx if satisfied else None,
        strong_stream=stream,
        cross_rate=cross,
        own_rate=own,
        margin=margin,
        skipped=skipped,
    )


def evaluate_condition(realizations, pa: PowerAllocation, tol: Tolerance = DEFAULT_TOL, w=None) -> StrongDecision:
    """Test the strong-interference condition over a realization set.

    Satisfied when at least one candidate stream's rate at receiver 2
    reaches its own-receiver rate; the decision is ergodic over the
    supplied set, so callers choose the block granularity.
    """
    n = _infer_streams(realizations)
    prepared, skipped = _prepare_all(realizations, n, tol, w)
    return _decide(prepared, pa, skipped)


def sic_subtract(y2, ch: ExtendedChannel, p: PrecoderSet, pa: PowerAllocation, symbols, tx: int = 2, stream: int | None = None):
    """Subtract a decoded stream's contribution from receiver 2's frame.

    ``symbols`` are the unit-power modulation symbols of the decoded
    stream (scalar for one block, 1-D for a batch); the transmit power
    from ``pa`` scales the reconstruction.  Models error-free SIC.
    """
    if stream is None:
        raise InvalidInputError("stream index of the decoded stream is required")
    y2 = np.asarray(y2, dtype=complex)
    col = np.sqrt(pa.stream_power(tx, stream)) * (ch.h[1, tx] * p.matrices()[tx][:, stream])
    symbols = np.asarray(symbols, dtype=complex)
    if y2.ndim == 1:
        return y2 - col * symbols
    return y2 - col[:, None] * symbols[None, :]


def _zf_rates_all_users(prep: _Prepared, pa: PowerAllocation, m_per_user: tuple[int, int, int], pa_rx2: PowerAllocation | None = None) -> np.ndarray:
    """Summed per-user ZF rates (bits per channel use) for one realization.

    ``pa`` shapes the transmitted interference; ``pa_rx2``, when given,
    replaces the covariance model at receiver 2 (post-SIC the decoded
    stream no longer contributes).
    """
    ch, pn = prep.ch, prep.norm
    out = np.zeros(3)
    for rx in range(3):
        m = m_per_user[rx]
        if m == 0:
            continue
        pa_cov = pa_rx2 if (rx == 1 and pa_rx2 is not None) else pa
        q = interference_covariance(ch, pn, pa_cov, rx=rx)
        rates = stream_rates_zf(ch, pn, pa, rx=rx, zf=zf_filter(q, m))
        out[rx] = rates.sum() / ch.tau
    return out


def run_strong_ia(realizations, pa: PowerAllocation, n: int, tol: Tolerance = DEFAULT_TOL, w=None) -> SchemeResult:
    """Run the full scheme: decide, then SIC-assisted alignment or fallback.

    When the ergodic condition holds, users 1 and 3 zero-force their n
    streams, and receiver 2 cancels the strong stream before zero-forcing
    its own n.  Otherwise the linear mode runs at the same extension.
    The condition is evaluated at the supplied extension only.
    """
    if _infer_streams(realizations) != n:
        raise InvalidInputError("realizations do not match the requested stream count")
    prepared, skipped = _prepare_all(realizations, n, tol, w)
    decision = _decide(prepared, pa, skipped)
    if not decision.satisfied:
        fallback = run_linear_fallback(realizations, pa, n, tol=tol, w=w)
        return SchemeResult(
            scheme=fallback.scheme,
            rates=fallback.rates,
            sum_rate=fallback.sum_rate,
            dof_streams=fallback.dof_streams,
            block_length=fallback.block_length,
            decision=decision,
            skipped=fallback.skipped,
        )
    tx = decision.strong_user
    per_real = []
    for prep in prepared:
        pa_post_sic = pa.with_zeroed(tx, _candidate_stream(prep, tx))
        per_real.append(_zf_rates_all_users(prep, pa, (n, n, n), pa_rx2=pa_post_sic))
    rates = np.mean(per_real, axis=0)
    return SchemeResult(
        scheme=STRONG_IA,
        rates=rates,
        sum_rate=float(rates.sum()),
        dof_streams=(n, n, n),
        block_length=2 * n,
        decision=decision,
        skipped=skipped,
    )


def run_linear_fallback(realizations, pa: PowerAllocation, n1: int, tol: Tolerance = DEFAULT_TOL, w=None) -> SchemeResult:
    """Linear mode: user 2 gives up its last stream and zero-forces the rest.

    Same precoder chain; receiver 2 keeps only the n1 - 1 least
    interfered directions (its interference occupies n1 + 1 of the 2n1
    dimensions), receivers 1 and 3 keep n1.  The dropped stream is not
    transmitted and contributes zero rate.
    """
    if _infer_streams(realizations) != n1:
        raise InvalidInputError("realizations do not match the requested stream count")
    prepared, skipped = _prepare_all(realizations, n1, tol, w)
    pa_drop = pa.with_zeroed(1, n1 - 1)
    per_real = [
        _zf_rates_all_users(prep, pa_drop, (n1, n1 - 1, n1)) for prep in prepared
    ]
    rates = np.mean(per_real, axis=0)
    return SchemeResult(
        scheme=LINEAR_FALLBACK,
        rates=rates,
        sum_rate=float(rates.sum()),
        dof_streams=(n1, n1 - 1, n1),
        block_length=2 * n1,
        decision=None,
        skipped=skipped,
    )
