"""Moments of |L(1/2 + it, chi)| over t in [0, T] and primitive chi mod q.

Integration uses fixed-width Gauss-Legendre panels.  Work is split into
tasks of ``PANELS_PER_TASK`` consecutive panels; the split does not depend on
the worker count, and every reduction runs in (character, panel) order
through ``math.fsum``, so results are bit-identical for any number of
workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .analytic import WeightTable, l_values, smoothed_series
from .arith import factorize, omega, phi_star
from .characters import DirichletCharacter, build_group, enumerate_characters
from .predict import eq7_main, second_moment_main, theorem1_main

logger = logging.getLogger(__name__)

PANELS_PER_TASK = 16
HALVING_STRIDE = 10  # every tenth panel is re-integrated on two halves


@dataclass(frozen=True)
class MomentSpec:
    q: int
    T: float
    order: int = 4
    panel_width: float = 0.25
    points_per_panel: int = 8
    eps_series: float = 1e-6
    parity_filter: int | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        if self.T < 0:
            raise ValueError(f"T must be nonnegative, got {self.T}")
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")
        if not 0 < self.panel_width <= 1:
            raise ValueError(f"panel_width must lie in (0, 1], got {self.panel_width}")
        if self.points_per_panel < 4:
            raise ValueError(f"points_per_panel must be at least 4, got {self.points_per_panel}")
        if self.parity_filter not in (None, 0, 1):
            raise ValueError(f"parity_filter must be 0, 1 or None, got {self.parity_filter}")


@dataclass(frozen=True)
class SplitSpec:
    Z: float
    Z0: float

    @classmethod
    def for_modulus(cls, q: int, T: float) -> "SplitSpec":
        w = omega(q)
        Z = q * T / 2**w
        return cls(Z, Z / 9**w)


@dataclass
class MomentResult:
    spec: MomentSpec
    empirical: float
    predicted: float
    ratio: float
    char_count: int
    quadrature_error: float
    per_character: dict[str, float] = field(default_factory=dict, repr=False)
    per_panel: dict[str, np.ndarray] = field(default_factory=dict, repr=False)


# --------------------------------------------------------------------------
# panel layout
# --------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _legendre(points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


def _panel_edges(start: float, stop: float, width: float) -> np.ndarray:
    n = max(1, int(math.ceil((stop - start) / width - 1e-12)))
    return start + (stop - start) * np.arange(n + 1) / n


def _nodes(lo: float, hi: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _legendre(points)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


@dataclass(frozen=True)
class _Task:
    q: int
    exponents: tuple[tuple[int, ...], ...]
    order: int
    edges: tuple[float, ...]  # this task's panel edges
    first_panel: int
    points: int
    mode: str = "power"  # or "split"
    eps: float = 1e-6
    Z: float = 0.0


def _task_nodes(task: _Task):
    """Nodes for the task, plus slices for each panel and each halved panel."""
    ts, ws, panels, halves = [], [], [], {}
    pos = 0
    for j in range(len(task.edges) - 1):
        lo, hi = task.edges[j], task.edges[j + 1]
        t, w = _nodes(lo, hi, task.points)
        ts.append(t)
        ws.append(w)
        panels.append(slice(pos, pos + t.size))
        pos += t.size
        if (task.first_panel + j) % HALVING_STRIDE == 0:
            mid = 0.5 * (lo + hi)
            pair = []
            for a, b in ((lo, mid), (mid, hi)):
                t2, w2 = _nodes(a, b, task.points)
                ts.append(t2)
                ws.append(w2)
                pair.append(slice(pos, pos + t2.size))
                pos += t2.size
            halves[j] = pair
    return np.concatenate(ts), np.concatenate(ws), panels, halves


def _panel_sums(values: np.ndarray, w: np.ndarray, panels, halves):
    """Per-panel integrals and halving differences for one integrand row."""
    sums = np.array([math.fsum(values[s] * w[s]) for s in panels])
    diffs = {}
    for j, (s1, s2) in halves.items():
        fine = math.fsum(np.concatenate([values[s1] * w[s1], values[s2] * w[s2]]))
        diffs[j] = fine - sums[j]
    return sums, diffs


def _run_power_task(task: _Task):
    group = build_group(task.q)
    chars = [group.character(e) for e in task.exponents]
    t, w, panels, halves = _task_nodes(task)
    L, _ = l_values(chars, 0.5 + 1j * t)
    integrand = np.abs(L) ** task.order
    return [_panel_sums(row, w, panels, halves) for row in integrand]


def _run_split_task(task: _Task):
    group = build_group(task.q)
    chars = [group.character(e) for e in task.exponents]
    t, w, panels, halves = _task_nodes(task)
    A = np.zeros((len(chars), t.size), dtype=complex)
    B = np.zeros_like(A)
    for i, ti in enumerate(t):
        tables = {}
        for c, chi in enumerate(chars):
            a = chi.parity_a
            if a not in tables:
                tables[a] = WeightTable(task.q, ti, a)
            A[c, i], B[c, i] = _split_from_series(smoothed_series(ti, chi, task.eps, tables[a]), task.Z)
    rows = {
        "A2": np.abs(A) ** 2,
        "AB": (A * np.conj(B)).real,
        "B2": np.abs(B) ** 2,
    }
    return {k: [_panel_sums(r, w, panels, halves) for r in v] for k, v in rows.items()}


def _build_tasks(chars, T, spec: MomentSpec, start: float = 0.0, mode="power", Z=0.0):
    edges = _panel_edges(start, T, spec.panel_width)
    tasks = []
    exps = tuple(chi.exponents for chi in chars)
    for first in range(0, len(edges) - 1, PANELS_PER_TASK):
        chunk = tuple(float(e) for e in edges[first : first + PANELS_PER_TASK + 1])
        tasks.append(
            _Task(chars[0].q, exps, spec.order, chunk, first, spec.points_per_panel,
                  mode, spec.eps_series, Z)
        )
    return tasks, len(edges) - 1


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _collect(results, n_chars: int, n_panels: int):
    """Stack task outputs into (chars x panels) sums and a halving error per character."""
    sums = np.zeros((n_chars, n_panels))
    diffs: list[list[float]] = [[] for _ in range(n_chars)]
    pos = 0
    for res in results:
        width = res[0][0].size if res else 0
        for c, (s, d) in enumerate(res):
            sums[c, pos : pos + width] = s
            diffs[c].extend(abs(d[j]) for j in sorted(d))
        pos += width
    n_sampled = len(range(0, n_panels, HALVING_STRIDE))
    scale = n_panels / n_sampled if n_sampled else 0.0
    errors = [math.fsum(d) * scale for d in diffs]
    return sums, errors


def _select(q: int, spec: MomentSpec) -> list[DirichletCharacter]:
    chars = enumerate_characters(build_group(q), primitive_only=True)
    if spec.parity_filter is not None:
        chars = [c for c in chars if c.parity_a == spec.parity_filter]
    return chars


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


def integrate_power_detailed(chi: DirichletCharacter, T: float, order: int, spec: MomentSpec | None = None,
                             start: float = 0.0, workers: int = 1) -> tuple[float, float]:
    """``(integral, error)`` of ``|L(1/2 + it, chi)|^order`` over ``[start, T]``."""
    if not chi.primitive:
        raise ValueError("integrate_power requires a primitive character")
    if T < start:
        raise ValueError(f"need T >= start, got T={T}")
    spec = MomentSpec(chi.q, T, order) if spec is None else replace(spec, q=chi.q, T=T, order=order)
    if T == start:
        return 0.0, 0.0
    tasks, n_panels = _build_tasks([chi], T, spec, start)
    sums, errors = _collect(_map(_run_power_task, tasks, workers), 1, n_panels)
    return math.fsum(sums[0]), errors[0]


def integrate_power(chi: DirichletCharacter, T: float, order: int, spec: MomentSpec | None = None) -> float:
    return integrate_power_detailed(chi, T, order, spec)[0]


def predicted_moment(q: int, T: float, order: int) -> float:
    if T <= 0:
        return 0.0
    return theorem1_main(q, T) if order == 4 else second_moment_main(q, T)


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.nan
    return num / den


def moment(q: int, T: float, order: int = 4, spec: MomentSpec | None = None, workers: int = 1) -> MomentResult:
    """Sum over primitive chi mod q of ``int_0^T |L(1/2 + it, chi)|^order dt``.

    ``predicted`` is the family main term: :func:`theorem1_main` for order 4
    and ``phi*(q)`` copies of the single-character mean square for order 2.
    With a parity filter the prediction still refers to the full family.
    """
    spec = MomentSpec(q, T, order) if spec is None else replace(spec, q=q, T=T, order=order)
    chars = _select(q, spec)
    predicted = predicted_moment(q, T, order)
    if not chars or T == 0:
        return MomentResult(spec, 0.0, predicted, _ratio(0.0, predicted), len(chars), 0.0,
                            {c.id: 0.0 for c in chars})
    tasks, n_panels = _build_tasks(chars, T, spec)
    sums, errors = _collect(_map(_run_power_task, tasks, workers), len(chars), n_panels)
    per_char = {chi.id: math.fsum(sums[i]) for i, chi in enumerate(chars)}
    empirical = math.fsum(sums.ravel())
    logger.debug("moment q=%s T=%s order=%s -> %s", q, T, order, empirical)
    return MomentResult(
        spec,
        empirical,
        predicted,
        _ratio(empirical, predicted),
        len(chars),
        math.fsum(errors),
        per_char,
        {chi.id: sums[i] for i, chi in enumerate(chars)},
    )


def _split_from_series(series, Z: float) -> tuple[complex, complex]:
    A = series.partial(Z)
    return A, series.total() - A


def ab_split(t: float, chi: DirichletCharacter, Z: float, eps: float = 1e-6) -> tuple[complex, complex]:
    """Split ``|L(1/2 + it, chi)|^2 / 2`` into the ``ab <= Z`` part A and the rest B."""
    return _split_from_series(smoothed_series(t, chi, eps), Z)


@dataclass
class Decomposition:
    q: int
    T: float
    Z: float
    Z0: float
    A2: float
    AB: float
    B2: float
    total: float
    fourth_moment: float
    relative_difference: float
    cauchy_ok: bool
    eq7: float
    A2_ratio: float
    quadrature_error: float


def decomposed_fourth_moment(q: int, T: float, spec: MomentSpec | None = None, workers: int = 1) -> Decomposition:
    """Integrate A^2, AB and B^2 over t and primitive chi; compare against :func:`moment`."""
    spec = MomentSpec(q, T, 4) if spec is None else replace(spec, q=q, T=T, order=4)
    split = SplitSpec.for_modulus(q, T)
    chars = _select(q, spec)
    ref = moment(q, T, 4, spec, workers)
    parts = {"A2": 0.0, "AB": 0.0, "B2": 0.0}
    err = 0.0
    if chars and T > 0:
        tasks, n_panels = _build_tasks(chars, T, spec, mode="split", Z=split.Z)
        results = _map(_run_split_task, tasks, workers)
        for key in parts:
            sums, errors = _collect([r[key] for r in results], len(chars), n_panels)
            parts[key] = math.fsum(sums.ravel())
            err += math.fsum(errors)
    total = 4 * (parts["A2"] + 2 * parts["AB"] + parts["B2"])
    rel = abs(total - ref.empirical) / ref.empirical if ref.empirical else abs(total)
    cauchy = parts["AB"] ** 2 <= parts["A2"] * parts["B2"] * (1 + 1e-9)
    e7 = eq7_main(q, T) if T > 0 else 0.0
    return Decomposition(q, T, split.Z, split.Z0, parts["A2"], parts["AB"], parts["B2"], total,
                         ref.empirical, rel, cauchy, e7, _ratio(parts["A2"], e7), err)


def char_count_consistent(result: MomentResult) -> bool:
    if result.spec.parity_filter is not None:
        return True
    return result.char_count == phi_star(factorize(result.spec.q))
