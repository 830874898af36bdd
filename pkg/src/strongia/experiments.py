"""Monte Carlo sweep harness and degrees-of-freedom utilities.

A sweep draws seeded channel realizations per SNR point, runs the
requested schemes on shared realizations, and produces plot-ready rows.
Output is a pure function of the configuration: per-trial realizations
derive from (seed, snr index, trial index), and averaging follows a
fixed trial order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ExtensionConfig,
    GainModel,
    apply_gain_boost,
    draw_channel,
)
from .errors import ConfigError, DegenerateChannelError, InvalidInputError, SingularChannelError
from .precoding import balanced_generator, build_precoders
from .receivers import PowerAllocation
from .strong_ia import LINEAR_FALLBACK, STRONG_IA, run_linear_fallback, run_strong_ia

_GENERATORS = {"ones": None, "balanced": balanced_generator}

__all__ = [
    "ExperimentConfig",
    "SweepRow",
    "dof_region_contains",
    "estimate_dof_slope",
    "run_sweep",
    "write_csv",
    "write_summary",
    "CSV_HEADER",
]

CSV_HEADER = "snr_db,scheme,trials,condition_rate,rate_u1,rate_u2,rate_u3,sum_rate"

_RESAMPLE_ATTEMPTS = 10

_SNR_DEFINITION = "snr_db = 10*log10(total power per transmitter), unit noise variance"
_CHANNEL_NOTE = "coefficients i.i.d. unit-variance circularly symmetric complex Gaussian per slot"


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one Monte Carlo sweep.

    ``gain_boosts`` holds 0-based ``(rx, tx, factor)`` triples applied to
    every drawn realization, used to force or deny the strong condition.
    """

    n: int = 3
    trials: int = 100
    snr_grid_db: tuple = (10.0, 20.0, 30.0, 40.0, 50.0)
    seed: int = 0
    schemes: tuple = (STRONG_IA, LINEAR_FALLBACK)
    gain_kind: str = "gaussian"
    h_min: float = 0.1
    h_max: float = 10.0
    gain_boosts: tuple = ()
    generator: str = "ones"

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.generator not in _GENERATORS:
            raise ConfigError(
                f"generator must be one of {sorted(_GENERATORS)}, got {self.generator!r}"
            )
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        grid = tuple(float(s) for s in self.snr_grid_db)
        if not grid:
            raise ConfigError("SNR grid must be nonempty")
        if any(b >= a for a, b in zip(grid[1:], grid)):
            raise ConfigError("SNR grid must be strictly increasing")
        object.__setattr__(self, "snr_grid_db", grid)
        schemes = tuple(self.schemes)
        if not schemes or any(s not in (STRONG_IA, LINEAR_FALLBACK) for s in schemes):
            raise ConfigError(f"schemes must be a nonempty subset of "
                              f"{{{STRONG_IA!r}, {LINEAR_FALLBACK!r}}}, got {schemes}")
        object.__setattr__(self, "schemes", schemes)
        boosts = tuple((int(rx), int(tx), float(f)) for rx, tx, f in self.gain_boosts)
        for rx, tx, f in boosts:
            if not (0 <= rx < 3 and 0 <= tx < 3):
                raise ConfigError(f"boost link ({rx}, {tx}) out of range")
            if not (np.isfinite(f) and f > 0):
                raise ConfigError(f"boost factor must be finite and positive, got {f}")
        object.__setattr__(self, "gain_boosts", boosts)
        self.gain_model()  # validates kind and magnitude window

    def gain_model(self) -> GainModel:
        if self.gain_kind == "bounded":
            return GainModel.bounded(self.h_min, self.h_max)
        return GainModel(kind=self.gain_kind)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "snr_grid_db": list(self.snr_grid_db),
            "seed": self.seed,
            "schemes": list(self.schemes),
            "gain_kind": self.gain_kind,
            "h_min": self.h_min,
            "h_max": self.h_max,
            "gain_boosts": [list(b) for b in self.gain_boosts],
            "generator": self.generator,
        }


@dataclass(frozen=True)
class SweepRow:
    """One (SNR point, scheme) result.

    ``scheme`` is the requested scheme; when the strong scheme's ergodic
    condition fails it runs the linear mode internally, visible as
    ``condition_rate`` 0 and in ``detail['executed_scheme']``.  One
    ergodic decision is taken per row, so ``condition_rate`` is 0 or 1
    here; finer block granularity is up to library callers.
    """

    snr_db: float
    scheme: str
    trials_used: int
    condition_rate: float
    rate_user1: float
    rate_user2: float
    rate_user3: float
    sum_rate: float
    dof_estimate: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "scheme": self.scheme,
            "trials_used": self.trials_used,
            "condition_rate": self.condition_rate,
            "rate_user1": self.rate_user1,
            "rate_user2": self.rate_user2,
            "rate_user3": self.rate_user3,
            "sum_rate": self.sum_rate,
            "dof_estimate": self.dof_estimate,
            "detail": self.detail,
        }


def dof_region_contains(d, atol: float = 1e-9) -> bool:
    """True iff the point lies in the pairwise-sum degrees-of-freedom region.

    The region is all nonnegative vectors with d_i + d_j <= 1 for every
    pair i != j; a small absolute slack absorbs grid rounding.
    """
    v = np.asarray(d, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise InvalidInputError(f"expected a vector of per-user values, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("degrees-of-freedom values must be finite")
    if np.any(v < -atol):
        return False
    pairsums = v[:, None] + v[None, :]
    np.fill_diagonal(pairsums, -np.inf)
    return bool(np.max(pairsums) <= 1.0 + atol)


def estimate_dof_slope(points) -> float:
    """Least-squares slope of sum rate versus log2 of linear SNR.

    ``points`` is a sequence of (snr_db, sum_rate) pairs from the
    high-SNR regime; the slope estimates the total degrees of freedom.
    """
    pts = [(float(s), float(r)) for s, r in points]
    if len(pts) < 2:
        raise InvalidInputError("slope estimation needs at least two points")
    snr_db = np.array([p[0] for p in pts])
    if np.unique(snr_db).size < 2:
        raise InvalidInputError("slope estimation needs at least two distinct SNRs")
    x = snr_db * (np.log2(10.0) / 10.0)
    y = np.array([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def _draw_point_realizations(cfg: ExperimentConfig, snr_index: int):
    """Vetted realizations for one SNR point, resampling degenerate draws."""
    ext = ExtensionConfig(cfg.n)
    gm = cfg.gain_model()
    boosts = {(rx, tx): f for rx, tx, f in cfg.gain_boosts}
    gen = _GENERATORS[cfg.generator]
    realizations = []
    resampled = 0
    dropped = 0
    for trial in range(cfg.trials):
        base = (snr_index * cfg.trials + trial) * (_RESAMPLE_ATTEMPTS + 1)
        for attempt in range(_RESAMPLE_ATTEMPTS):
            ch = draw_channel(ext, gm, cfg.seed, base + attempt)
            if boosts:
                ch = apply_gain_boost(ch, boosts)
            try:
                build_precoders(ch, cfg.n, w=gen)
            except (DegenerateChannelError, SingularChannelError):
                resampled += 1
                continue
            realizations.append(ch)
            break
        else:
            dropped += 1
    return realizations, resampled, dropped


def run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Run every (SNR point, scheme) cell of the sweep.

    Schemes at one SNR point share the same realizations (they use the
    same extension length), so comparisons are paired.
    """
    collected = []
    gen = _GENERATORS[cfg.generator]
    for si, snr_db in enumerate(cfg.snr_grid_db):
        p_total = 10.0 ** (snr_db / 10.0)
        pa = PowerAllocation.uniform(p_total, cfg.n)
        realizations, resampled, dropped = _draw_point_realizations(cfg, si)
        if not realizations:
            raise DegenerateChannelError(f"no usable realizations at {snr_db} dB")
        for scheme in cfg.schemes:
            if scheme == STRONG_IA:
                res = run_strong_ia(realizations, pa, cfg.n, w=gen)
                satisfied = bool(res.decision is not None and res.decision.satisfied)
                condition_rate = 1.0 if satisfied else 0.0
                decision_dict = res.decision.to_dict() if res.decision else None
            else:
                res = run_linear_fallback(realizations, pa, cfg.n, w=gen)
                condition_rate = 0.0
                decision_dict = None
            collected.append(
                dict(
                    snr_db=float(snr_db),
                    scheme=scheme,
                    trials_used=len(realizations),
                    condition_rate=condition_rate,
                    rate_user1=float(res.rates[0]),
                    rate_user2=float(res.rates[1]),
                    rate_user3=float(res.rates[2]),
                    sum_rate=res.sum_rate,
                    detail={
                        "executed_scheme": res.scheme,
                        "decision": decision_dict,
                        "resampled": resampled,
                        "dropped_trials": dropped,
                        "dof_streams": list(res.dof_streams),
                        "block_length": res.block_length,
                    },
                )
            )

    slopes = {}
    for scheme in cfg.schemes:
        pts = [(r["snr_db"], r["sum_rate"]) for r in collected if r["scheme"] == scheme]
        slopes[scheme] = estimate_dof_slope(pts) if len(pts) >= 2 else None
    return [SweepRow(dof_estimate=slopes[r["scheme"]], **r) for r in collected]


def _fmt(x: float) -> str:
    return repr(float(x))


def csv_lines(rows) -> list[str]:
    """Header plus one line per row, full float precision for diffability."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r.snr_db),
                    r.scheme,
                    str(r.trials_used),
                    _fmt(r.condition_rate),
                    _fmt(r.rate_user1),
                    _fmt(r.rate_user2),
                    _fmt(r.rate_user3),
                    _fmt(r.sum_rate),
                ]
            )
        )
    return lines


def write_csv(rows, path) -> None:
    """Write sweep rows as CSV; byte-identical for identical configs."""
    with open(path, "w") as fh:
        fh.write("\n".join(csv_lines(rows)) + "\n")


def write_summary(cfg: ExperimentConfig, rows, path) -> None:
    """Companion JSON: config echo, metadata, per-row details, slopes."""
    from . import __version__

    slopes = {}
    for scheme in cfg.schemes:
        for r in rows:
            if r.scheme == scheme:
                slopes[scheme] = r.dof_estimate
                break
    payload = {
        "version": __version__,
        "config": cfg.to_dict(),
        "snr_definition": _SNR_DEFINITION,
        "channel_note": _CHANNEL_NOTE,
        "dof_slopes": slopes,
        "rows": [r.to_dict() for r in rows],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
