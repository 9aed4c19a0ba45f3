"""Readout calibration, zero-noise extrapolation and Gauss-law post-selection.

Stage order: calibrate (constrained inversion per noise scale) ->
extrapolate to zero noise -> post-select onto physical states -> renormalize.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .simulator import CountsTable, NoiseModel, sample_counts

__all__ = [
    "STAGES",
    "ConvergenceError",
    "PostSelectionError",
    "CalibrationMatrix",
    "build_calibration",
    "constrained_invert",
    "zero_noise_extrapolate",
    "extrapolate_observable",
    "post_select",
    "MitigationRecord",
    "mitigate",
    "rows_to_text",
]

STAGES = ("raw", "calibrated", "extrapolated", "post_selected")


class ConvergenceError(RuntimeError):
    pass


class PostSelectionError(ValueError):
    """No probability left in the physical subspace."""


@dataclass
class CalibrationMatrix:
    matrix: np.ndarray
    shots_per_state: int | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("calibration matrix must be square")
        if np.any(m < 0) or np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-12:
            raise ValueError("calibration matrix must be column stochastic")
        self.matrix = m

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def build_calibration(noise: NoiseModel, shots_per_state: int, rng_seed=None, width: int = 4) -> CalibrationMatrix:
    """Prepare each basis state, read it out ``shots_per_state`` times.

    Preparation uses X gates only, so just the readout channel acts.
    """
    if shots_per_state < 1:
        raise ValueError("shots_per_state must be >= 1")
    rng = np.random.default_rng(rng_seed)
    conf = noise.confusion_matrix(width)
    cols = [sample_counts(conf[:, j], shots_per_state, rng).probabilities() for j in range(2**width)]
    return CalibrationMatrix(np.column_stack(cols), shots_per_state)


def _kkt_solve(Q, c, free):
    k = len(free)
    A = np.zeros((k + 1, k + 1))
    A[:k, :k] = Q[np.ix_(free, free)]
    A[:k, k] = 1.0
    A[k, :k] = 1.0
    rhs = np.concatenate([c[free], [1.0]])
    sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return sol[:k], sol[k]


def constrained_invert(
    cal, observed, tol: float = 1e-10, max_iter: int | None = None
) -> np.ndarray:
    """``argmin ||C p - observed||`` over the probability simplex.

    Primal active-set method: the working set holds coordinates pinned at
    zero; each iteration solves the equality-constrained problem on the free
    coordinates, steps to the first blocking bound, or releases the bound
    with the most negative multiplier.
    """
    C = cal.matrix if isinstance(cal, CalibrationMatrix) else np.asarray(cal, dtype=float)
    y = np.asarray(observed, dtype=float)
    n = C.shape[1]
    if C.shape[0] != y.shape[0]:
        raise ValueError("calibration and observation dimensions differ")
    Q = C.T @ C
    c = C.T @ y
    p = np.full(n, 1.0 / n)
    pinned = np.zeros(n, dtype=bool)
    max_iter = max_iter or 20 * n + 50
    for _ in range(max_iter):
        free = np.flatnonzero(~pinned)
        target, nu = _kkt_solve(Q, c, free)
        d = target - p[free]
        if np.all(target >= -tol):
            p[:] = 0.0
            p[free] = np.clip(target, 0.0, None)
            mu = Q @ p - c + nu
            mu[~pinned] = 0.0
            k = int(np.argmin(mu))
            if mu[k] >= -tol:
                return p / p.sum()
            pinned[k] = False
            continue
        shrinking = d < 0
        ratios = np.full(len(free), np.inf)
        ratios[shrinking] = -p[free][shrinking] / d[shrinking]
        j = int(np.argmin(ratios))
        alpha = min(1.0, max(ratios[j], 0.0))
        p[free] = p[free] + alpha * d
        p[free[j]] = 0.0
        pinned[free[j]] = True
    raise ConvergenceError(f"active-set solver did not converge in {max_iter} iterations")


def zero_noise_extrapolate(p_r1, p_r2, renormalize: bool = True) -> np.ndarray:
    """Linear extrapolation ``2 p_1 - p_2`` to zero noise, clipped onto the simplex."""
    a, b = np.asarray(p_r1, dtype=float), np.asarray(p_r2, dtype=float)
    if a.shape != b.shape:
        raise ValueError("probability vectors differ in length")
    p0 = 2.0 * a - b
    if not renormalize:
        return p0
    p0 = np.clip(p0, 0.0, None)
    s = p0.sum()
    if s <= 0.0:
        raise ValueError("extrapolated distribution has no positive mass")
    return p0 / s


def extrapolate_observable(o_r1: float, o_r2: float) -> float:
    return 2.0 * o_r1 - o_r2


def post_select(p, physical: Sequence[int]) -> tuple[np.ndarray, float]:
    """Restrict to physical indices and renormalize; also return the survival."""
    p = np.asarray(p, dtype=float)
    idx = np.asarray(physical, dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= p.shape[0]):
        raise IndexError("physical index out of range")
    kept = p[idx]
    survival = float(kept.sum())
    if survival <= 0.0:
        raise PostSelectionError("post-selection undefined: survival probability is zero")
    return kept / survival, survival


@dataclass
class StageValue:
    electric_energy: float
    survival: float
    stderr: float = 0.0
    survival_stderr: float = 0.0


@dataclass
class MitigationRecord:
    """All stages of one ``(t, n_trot)`` cell.

    ``raw`` and ``calibrated`` are keyed by noise scale ``r``;
    ``post_selected`` lives on the physical states only.
    """

    t: float
    n_trot: int
    raw: dict[int, np.ndarray]
    calibrated: dict[int, np.ndarray]
    extrapolated: np.ndarray
    post_selected: np.ndarray
    survival: float
    values: dict[tuple[str, int], StageValue] = field(default_factory=dict)
    clipped_mass: float = 0.0
    mode: str = "probabilities"
    stages: tuple[str, ...] = STAGES

    @property
    def mitigated_energy(self) -> float:
        return self.values[("post_selected", 0)].electric_energy

    def rows(self, noiseless: float | None = None) -> list[dict]:
        out = []
        for stage in self.stages:
            for (st, r), v in sorted(self.values.items(), key=lambda kv: kv[0][1]):
                if st != stage:
                    continue
                row = {
                    "t": self.t,
                    "n_trot": self.n_trot,
                    "r": r,
                    "stage": stage,
                    "survival": v.survival,
                    "electric_energy": v.electric_energy,
                    "stderr": v.stderr,
                }
                if noiseless is not None:
                    row["noiseless"] = noiseless
                out.append(row)
        return out


def _pipeline(probs: Mapping[int, np.ndarray], cal, physical, weights, mode):
    phys_w = weights[physical]
    calibrated = {r: constrained_invert(cal, p) for r, p in probs.items()}
    vals = {}
    for r, p in probs.items():
        vals[("raw", r)] = (float(p @ weights), float(p[physical].sum()))
    for r, p in calibrated.items():
        vals[("calibrated", r)] = (float(p @ weights), float(p[physical].sum()))
    if 2 in calibrated:
        raw0 = zero_noise_extrapolate(calibrated[1], calibrated[2], renormalize=False)
        clipped = float(-raw0[raw0 < 0].sum())
        p0 = zero_noise_extrapolate(calibrated[1], calibrated[2])
    else:
        p0, clipped = calibrated[1], 0.0
    vals[("extrapolated", 0)] = (float(p0 @ weights), float(p0[physical].sum()))
    if mode == "observable" and 2 in calibrated:
        e = {}
        surv = {}
        for r in (1, 2):
            ps, s = post_select(calibrated[r], physical)
            e[r], surv[r] = float(ps @ phys_w), s
        ps, survival = post_select(p0, physical)
        vals[("post_selected", 0)] = (extrapolate_observable(e[1], e[2]), survival)
    else:
        ps, survival = post_select(p0, physical)
        vals[("post_selected", 0)] = (float(ps @ phys_w), survival)
    return calibrated, p0, ps, survival, vals, clipped


def mitigate(
    counts: Mapping[int, CountsTable],
    cal: CalibrationMatrix,
    physical: Sequence[int],
    observable_diagonal,
    t: float = 0.0,
    n_trot: int = 1,
    n_bootstrap: int = 200,
    rng_seed=None,
    mode: str = "probabilities",
) -> MitigationRecord:
    """Run the full pipeline on counts at noise scales ``r`` (1, optionally 2).

    Standard errors come from parametric bootstrap resampling of the counts.
    ``mode="observable"`` extrapolates the post-selected energy instead of
    the probabilities.
    """
    if 1 not in counts:
        raise ValueError("counts at r=1 are required")
    if set(counts) - {1, 2}:
        raise ValueError("only r in {1, 2} is supported")
    if mode not in ("probabilities", "observable"):
        raise ValueError(f"unknown extrapolation mode {mode!r}")
    w = np.real(np.asarray(observable_diagonal, dtype=float))
    physical = np.asarray(physical, dtype=int)
    probs = {r: c.probabilities() for r, c in counts.items()}
    calibrated, p0, ps, survival, vals, clipped = _pipeline(probs, cal, physical, w, mode)

    rng = np.random.default_rng(rng_seed)
    samples: dict[tuple[str, int], list[tuple[float, float]]] = {k: [] for k in vals}
    for _ in range(n_bootstrap):
        boot = {r: rng.multinomial(c.shots, probs[r]) / c.shots for r, c in counts.items()}
        try:
            *_, bvals, _ = _pipeline(boot, cal, physical, w, mode)
        except PostSelectionError:
            continue
        for k, v in bvals.items():
            samples[k].append(v)
    values = {}
    for k, (e, s) in vals.items():
        arr = np.array(samples[k]) if samples[k] else np.zeros((0, 2))
        se = float(arr[:, 0].std(ddof=1)) if len(arr) > 1 else 0.0
        ss = float(arr[:, 1].std(ddof=1)) if len(arr) > 1 else 0.0
        values[k] = StageValue(e, s, se, ss)
    return MitigationRecord(
        t=t,
        n_trot=n_trot,
        raw=probs,
        calibrated=calibrated,
        extrapolated=p0,
        post_selected=ps,
        survival=survival,
        values=values,
        clipped_mass=clipped,
        mode=mode,
    )


ROW_COLUMNS = ("t", "n_trot", "r", "stage", "survival", "electric_energy", "stderr", "noiseless")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def rows_to_text(rows: Sequence[Mapping], delimiter: str = ",") -> str:
    """Delimited text with a header; floats printed with 12 significant digits."""
    cols = [c for c in ROW_COLUMNS if any(c in r for r in rows)] or list(ROW_COLUMNS[:7])
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()
