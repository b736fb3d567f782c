"""Self-contained dense linear-program solver.

Maximizes c.x subject to row constraints (<=, =, >=) and per-variable
bounds, via a two-phase tableau simplex with Bland's anti-cycling rule.
Small and dependency-free on purpose: the label-generation programs
solved here have a handful of variables and at most a few hundred rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedError, InternalError, UsageError

PIVOT_EPS = 1e-11
COST_EPS = 1e-9
FEAS_EPS = 1e-7
MAX_ITERS = 20000

RELATIONS = ("<=", "=", ">=")


@dataclass
class LinearProgram:
    """maximize objective . x subject to constraints and bounds.

    constraints: list of (row, relation, rhs) with relation in <=, =, >=.
    bounds: per-variable (lower, upper); None means unbounded on that
    side. Default bounds are (0, None) for every variable.
    """

    objective: np.ndarray
    constraints: list[tuple[np.ndarray, str, float]]
    bounds: list[tuple[float | None, float | None]] | None = None

    def n_vars(self) -> int:
        return len(self.objective)


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    values: np.ndarray
    objective_value: float


def _validate(lp: LinearProgram) -> list[tuple[float | None, float | None]]:
    nv = lp.n_vars()
    if nv < 1:
        raise UsageError("linear program has no variables")
    if not np.all(np.isfinite(lp.objective)):
        raise UsageError("objective coefficients must be finite")
    for idx, (row, rel, rhs) in enumerate(lp.constraints):
        if len(row) != nv:
            raise UsageError(f"constraint {idx} has {len(row)} coefficients, expected {nv}")
        if rel not in RELATIONS:
            raise UsageError(f"constraint {idx} has unknown relation {rel!r}")
        if not (np.all(np.isfinite(row)) and np.isfinite(rhs)):
            raise UsageError(f"constraint {idx} has non-finite coefficients")
    bounds = lp.bounds if lp.bounds is not None else [(0.0, None)] * nv
    if len(bounds) != nv:
        raise UsageError("one (lower, upper) bound pair per variable is required")
    return bounds


def _to_nonnegative(lp: LinearProgram, bounds) -> tuple:
    """Rewrite x = T z + t with z >= 0; upper bounds become extra rows."""
    nv = lp.n_vars()
    cols: list[tuple[int, float]] = []  # (original var, sign) per z column
    t = np.zeros(nv)
    rows = [(np.asarray(r, dtype=np.float64), rel, float(rhs)) for r, rel, rhs in lp.constraints]
    for i, (lo, hi) in enumerate(bounds):
        unit = np.zeros(nv)
        unit[i] = 1.0
        if lo is None and hi is None:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
        elif lo is None:
            # x <= hi only: substitute x = hi - z
            cols.append((i, -1.0))
            t[i] = float(hi)
        else:
            cols.append((i, 1.0))
            t[i] = float(lo)
            if hi is not None:
                rows.append((unit, "<=", float(hi)))

    def project(row: np.ndarray) -> np.ndarray:
        return np.array([row[i] * s for i, s in cols])

    a_rows = []
    for row, rel, rhs in rows:
        a_rows.append((project(row), rel, rhs - float(row @ t)))
    c_z = project(np.asarray(lp.objective, dtype=np.float64))
    c_shift = float(np.asarray(lp.objective) @ t)
    return cols, t, a_rows, c_z, c_shift


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int):
    tab[row] = tab[row] / tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] = tab[i] - tab[i, col] * tab[row]
    basis[row] = col


def _run_simplex(tab: np.ndarray, basis: list[int], cost: np.ndarray, enterable: np.ndarray) -> str:
    """Minimize cost over the tableau in place. Returns optimal|unbounded."""
    m = tab.shape[0]
    for _ in range(MAX_ITERS):
        cb = cost[basis]
        reduced = cost - cb @ tab[:, :-1]
        entering = -1
        for j in range(len(cost)):  # Bland: smallest improving index
            if enterable[j] and reduced[j] < -COST_EPS:
                entering = j
                break
        if entering < 0:
            return "optimal"
        leaving = -1
        best = np.inf
        saw_tiny_pivot = False
        for i in range(m):
            coef = tab[i, entering]
            if coef > PIVOT_EPS:
                ratio = tab[i, -1] / coef
                if ratio < best - 1e-12 or (
                    abs(ratio - best) <= 1e-12 and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
            elif coef > 0.0:
                saw_tiny_pivot = True
        if leaving < 0:
            if saw_tiny_pivot:
                raise IllConditionedError(
                    "simplex pivot below numerical threshold",
                    {"threshold": PIVOT_EPS},
                )
            return "unbounded"
        _pivot(tab, basis, leaving, entering)
    raise InternalError("simplex did not terminate within the iteration cap")


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex. Infeasible/unbounded are statuses, not errors."""
    bounds = _validate(lp)
    cols, t, a_rows, c_z, c_shift = _to_nonnegative(lp, bounds)
    nz = len(cols)
    m = len(a_rows)
    nv = lp.n_vars()

    if m == 0:
        # no constraints at all: optimum exists only if nothing improves
        if np.any(c_z > COST_EPS):
            return LpSolution("unbounded", np.full(nv, np.nan), np.nan)
        x = t.copy()
        return LpSolution("optimal", x, float(np.asarray(lp.objective) @ x))

    # column layout: z vars | slack/surplus | artificials | rhs
    n_slack = sum(1 for _, rel, _ in a_rows if rel != "=")
    slack_of: dict[int, int] = {}
    art_rows: list[int] = []
    si = 0
    for i, (_, rel, _) in enumerate(a_rows):
        if rel != "=":
            slack_of[i] = nz + si
            si += 1
    total = nz + n_slack  # artificials appended below as needed

    rows = []
    basis: list[int] = []
    art_cols: list[int] = []
    for i, (row, rel, rhs) in enumerate(a_rows):
        if rhs < 0:
            row, rhs = -row, -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        full = np.zeros(total + 1)
        full[:nz] = row
        full[-1] = rhs
        if rel == "<=":
            rows.append((full, slack_of[i], 1.0, False))
        elif rel == ">=":
            rows.append((full, slack_of[i], -1.0, True))
        else:
            rows.append((full, None, 0.0, True))

    n_art = sum(1 for _, _, _, need in rows if need)
    width = total + n_art + 1
    tab = np.zeros((m, width))
    ai = 0
    for i, (full, scol, ssign, need_art) in enumerate(rows):
        tab[i, :total] = full[:total]
        tab[i, -1] = full[-1]
        if scol is not None:
            tab[i, scol] = ssign
        if need_art:
            col = total + ai
            tab[i, col] = 1.0
            art_cols.append(col)
            basis.append(col)
            ai += 1
        else:
            basis.append(scol)

    enterable = np.ones(width - 1, dtype=bool)

    if art_cols:
        phase1 = np.zeros(width - 1)
        phase1[art_cols] = 1.0
        status = _run_simplex(tab, basis, phase1, enterable)
        if status != "optimal":
            raise InternalError("phase-one objective cannot be unbounded")
        residual = float(phase1[basis] @ tab[:, -1])
        if residual > FEAS_EPS:
            return LpSolution("infeasible", np.full(nv, np.nan), np.nan)
        # drive leftover artificials out of the basis, dropping rows that
        # turned out redundant
        art_set = set(art_cols)
        keep = []
        for i in range(m):
            if basis[i] in art_set:
                pivot_col = -1
                for j in range(total):
                    if enterable[j] and abs(tab[i, j]) > 1e-9:
                        pivot_col = j
                        break
                if pivot_col < 0:
                    continue  # redundant row
                _pivot(tab, basis, i, pivot_col)
            keep.append(i)
        if len(keep) < m:
            tab = tab[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)
        enterable[art_cols] = False

    cost = np.zeros(width - 1)
    cost[:nz] = -c_z  # maximize c_z  ==  minimize -c_z
    status = _run_simplex(tab, basis, cost, enterable)
    if status == "unbounded":
        return LpSolution("unbounded", np.full(nv, np.nan), np.nan)

    z = np.zeros(width - 1)
    for i, b in enumerate(basis):
        z[b] = tab[i, -1]
    x = t.copy()
    for j, (var, sign) in enumerate(cols):
        x[var] += sign * z[j]
    return LpSolution("optimal", x, float(np.asarray(lp.objective) @ x))
