"""Linear programming over exact rationals, with a float twin.

The exact backend runs a dense two-phase simplex over rational arithmetic
(gmpy2.mpq when available, fractions.Fraction otherwise) with Bland's
smallest-index rule, so it terminates and is bit-for-bit deterministic. The
float backend runs the same algorithm over numpy rows with an epsilon
pivot tolerance, for models whose coefficients are irrational.

All variables carry an implicit lower bound of zero, constraints are `<=`
or `==`, and the objective sense is always maximize. Optimal solutions come
with dual values, so `verify_solution` can certify optimality independently
via weak duality; `vertex_enumeration_optimum` is a brute-force oracle for
small models that shares no code with the simplex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import SolverError

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpq = Fraction

LE = "<="
EQ = "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_MAX_PIVOTS = 200_000


@dataclass
class Constraint:
    name: str
    terms: dict[str, Fraction]
    rel: str
    rhs: Fraction


@dataclass
class LpModel:
    """A maximization LP: variables are nonnegative, rows are <= or ==."""

    variables: list[str] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)

    def add_var(self, name: str, obj=0) -> str:
        if name in self.objective:
            raise SolverError(f"duplicate variable {name!r}")
        self.variables.append(name)
        self.objective[name] = obj
        return name

    def add_le(self, name: str, terms: dict, rhs) -> None:
        self.constraints.append(Constraint(name, dict(terms), LE, rhs))

    def add_eq(self, name: str, terms: dict, rhs) -> None:
        self.constraints.append(Constraint(name, dict(terms), EQ, rhs))


@dataclass
class LpSolution:
    status: str
    value: object = None
    assignment: dict = field(default_factory=dict)
    duals: list = field(default_factory=list)
    ray: Optional[dict] = None
    backend: str = "exact"
    pivots: int = 0
    diagnostics: list[str] = field(default_factory=list)

    def __getitem__(self, var):
        return self.assignment.get(var, 0)


def solve_lp(model: LpModel, backend: str = "exact", eps: float = 1e-9) -> LpSolution:
    """Solve a maximization LP. `backend` is "exact" or "float"."""
    if backend == "exact":
        return _solve_exact(model)
    if backend == "float":
        return _solve_float(model, eps)
    raise SolverError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------- exact ---


def _to_field(x):
    if isinstance(x, (int, Fraction)):
        return _mpq(x)
    if isinstance(x, float):
        return _mpq(Fraction(x))
    return _mpq(x)


def _to_fraction(x):
    return Fraction(int(x.numerator), int(x.denominator)) if not isinstance(x, Fraction) else x


def _solve_exact(model: LpModel) -> LpSolution:
    zero = _mpq(0)
    one = _mpq(1)
    nvars = len(model.variables)
    index = {v: j for j, v in enumerate(model.variables)}
    m = len(model.constraints)

    # Dense rows; flip rows with negative rhs so phase 1 starts feasible.
    kinds = []  # per row: "slack" or "artificial-only" or "surplus+artificial"
    flipped = []
    rows = []
    rhs = []
    for con in model.constraints:
        a = [zero] * nvars
        for var, coef in con.terms.items():
            a[index[var]] += _to_field(coef)
        b = _to_field(con.rhs)
        flip = b < zero
        if flip:
            a = [-x for x in a]
            b = -b
        if con.rel == EQ:
            kind = "art"
        elif flip:
            kind = "sur"  # was <=, now >= after the flip
        else:
            kind = "slk"
        kinds.append(kind)
        flipped.append(flip)
        rows.append(a)
        rhs.append(b)

    # Column layout: x vars, then slack/surplus, then artificials.
    slack_col = [None] * m
    art_col = [None] * m
    ncols = nvars
    for i, kind in enumerate(kinds):
        if kind in ("slk", "sur"):
            slack_col[i] = ncols
            ncols += 1
    for i, kind in enumerate(kinds):
        if kind in ("art", "sur"):
            art_col[i] = ncols
            ncols += 1

    T = []
    for i in range(m):
        row = rows[i] + [zero] * (ncols - nvars) + [rhs[i]]
        if slack_col[i] is not None:
            row[slack_col[i]] = one if kinds[i] == "slk" else -one
        if art_col[i] is not None:
            row[art_col[i]] = one
        T.append(row)

    basis = [slack_col[i] if kinds[i] == "slk" else art_col[i] for i in range(m)]

    # Reduced-cost rows (z_j - c_j convention; entering while some entry < 0).
    p2 = [zero] * (ncols + 1)
    for var, coef in model.objective.items():
        p2[index[var]] = -_to_field(coef)
    p1 = [zero] * (ncols + 1)
    art_cols = {c for c in art_col if c is not None}
    for i in range(m):
        if basis[i] in art_cols:
            for j in range(ncols + 1):
                p1[j] -= T[i][j]
    for c in art_cols:
        p1[c] += one  # cost of artificials is -1 under maximize -(sum art)

    pivots = 0

    def pivot(r, col):
        nonlocal pivots
        pivots += 1
        if pivots > _MAX_PIVOTS:
            raise SolverError("pivot limit exceeded")
        prow = T[r]
        inv = one / prow[col]
        if inv != one:
            prow = [x * inv for x in prow]
            T[r] = prow
        for target in T:
            if target is prow:
                continue
            f = target[col]
            if f:
                for j in range(ncols + 1):
                    target[j] -= f * prow[j]
        for obj in (p1, p2):
            f = obj[col]
            if f:
                for j in range(ncols + 1):
                    obj[j] -= f * prow[j]
        basis[r] = col

    def run(obj, banned) -> Optional[int]:
        """Simplex iterations under Bland's rule. Returns an entering column
        with no positive pivot when unbounded, else None at optimality."""
        while True:
            enter = -1
            for j in range(ncols):
                if j in banned:
                    continue
                if obj[j] < zero:
                    enter = j
                    break
            if enter < 0:
                return None
            leave = -1
            best = None
            for i in range(m):
                coef = T[i][enter]
                if coef > zero:
                    ratio = T[i][ncols] / coef
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return enter
            pivot(leave, enter)

    # Phase 1: maximize -(sum of artificials); feasible iff optimum is 0.
    if art_cols:
        if run(p1, banned=frozenset()) is not None:
            raise SolverError("phase 1 unbounded")  # impossible: bounded by 0
        if p1[ncols] != zero:
            return LpSolution(status=INFEASIBLE, backend="exact", pivots=pivots)
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(ncols):
                    if j not in art_cols and T[i][j] != zero:
                        pivot(i, j)
                        break

    ray_col = run(p2, banned=art_cols)
    if ray_col is not None:
        ray = {}
        if ray_col < nvars:
            ray[model.variables[ray_col]] = Fraction(1)
        for i in range(m):
            if basis[i] < nvars and T[i][ray_col] != zero:
                ray[model.variables[basis[i]]] = _to_fraction(-T[i][ray_col])
        return LpSolution(status=UNBOUNDED, ray=ray, backend="exact", pivots=pivots)

    assignment = {}
    for i in range(m):
        if basis[i] < nvars:
            val = T[i][ncols]
            if val != zero:
                assignment[model.variables[basis[i]]] = _to_fraction(val)
    duals = []
    for i in range(m):
        col = art_col[i] if art_col[i] is not None else slack_col[i]
        y = p2[col]
        if flipped[i]:
            y = -y
        duals.append(_to_fraction(y))
    return LpSolution(
        status=OPTIMAL,
        value=_to_fraction(p2[ncols]),
        assignment=assignment,
        duals=duals,
        backend="exact",
        pivots=pivots,
    )


# ---------------------------------------------------------------- float ---


def _solve_float(model: LpModel, eps: float) -> LpSolution:
    nvars = len(model.variables)
    index = {v: j for j, v in enumerate(model.variables)}
    m = len(model.constraints)

    kinds = []
    flipped = []
    data = np.zeros((m, nvars))
    rhs = np.zeros(m)
    for i, con in enumerate(model.constraints):
        for var, coef in con.terms.items():
            data[i, index[var]] += float(coef)
        b = float(con.rhs)
        flip = b < 0
        if flip:
            data[i] = -data[i]
            b = -b
        rhs[i] = b
        kinds.append("art" if con.rel == EQ else ("sur" if flip else "slk"))
        flipped.append(flip)

    slack_col = [None] * m
    art_col = [None] * m
    ncols = nvars
    for i, kind in enumerate(kinds):
        if kind in ("slk", "sur"):
            slack_col[i] = ncols
            ncols += 1
    for i, kind in enumerate(kinds):
        if kind in ("art", "sur"):
            art_col[i] = ncols
            ncols += 1

    T = np.zeros((m, ncols + 1))
    T[:, :nvars] = data
    T[:, ncols] = rhs
    for i in range(m):
        if slack_col[i] is not None:
            T[i, slack_col[i]] = 1.0 if kinds[i] == "slk" else -1.0
        if art_col[i] is not None:
            T[i, art_col[i]] = 1.0
    basis = [slack_col[i] if kinds[i] == "slk" else art_col[i] for i in range(m)]

    p2 = np.zeros(ncols + 1)
    for var, coef in model.objective.items():
        p2[index[var]] = -float(coef)
    p1 = np.zeros(ncols + 1)
    art_cols = {c for c in art_col if c is not None}
    art_mask = np.zeros(ncols, dtype=bool)
    for c in art_cols:
        art_mask[c] = True
    for i in range(m):
        if basis[i] in art_cols:
            p1 -= T[i]
    p1[:ncols][art_mask] += 1.0

    pivots = 0
    scale = max(1.0, float(np.max(np.abs(T))))

    def pivot(r, col):
        nonlocal pivots
        pivots += 1
        if pivots > _MAX_PIVOTS:
            raise SolverError("pivot limit exceeded")
        T[r] /= T[r, col]
        colvals = T[:, col].copy()
        colvals[r] = 0.0
        T[:] -= np.outer(colvals, T[r])
        for obj in (p1, p2):
            f = obj[col]
            if f:
                obj -= f * T[r]
        basis[r] = col

    def run(obj, banned_mask) -> Optional[int]:
        while True:
            cand = (obj[:ncols] < -eps) & ~banned_mask
            if not cand.any():
                return None
            enter = int(np.argmax(cand))  # first eligible index: Bland
            col = T[:, enter]
            pos = col > eps
            if not pos.any():
                return enter
            ratios = np.where(pos, T[:, ncols] / np.where(pos, col, 1.0), np.inf)
            best = ratios.min()
            ties = np.nonzero(ratios <= best * (1 + 1e-12) + 1e-300)[0]
            leave = min(ties, key=lambda i: basis[i])
            pivot(leave, enter)

    none_mask = np.zeros(ncols, dtype=bool)
    if art_cols:
        if run(p1, none_mask) is not None:
            raise SolverError("phase 1 unbounded")
        if p1[ncols] < -eps * scale * max(1, m):
            return LpSolution(status=INFEASIBLE, backend="float", pivots=pivots)
        for i in range(m):
            if basis[i] in art_cols:
                row = np.abs(T[i, :ncols])
                row[art_mask] = 0.0
                j = int(np.argmax(row))
                if row[j] > eps:
                    pivot(i, j)

    ray_col = run(p2, art_mask)
    if ray_col is not None:
        ray = {}
        if ray_col < nvars:
            ray[model.variables[ray_col]] = 1.0
        for i in range(m):
            if basis[i] < nvars and abs(T[i, ray_col]) > eps:
                ray[model.variables[basis[i]]] = float(-T[i, ray_col])
        return LpSolution(status=UNBOUNDED, ray=ray, backend="float", pivots=pivots)

    assignment = {}
    for i in range(m):
        if basis[i] < nvars and abs(T[i, ncols]) > eps:
            assignment[model.variables[basis[i]]] = float(T[i, ncols])
    duals = []
    for i in range(m):
        col = art_col[i] if art_col[i] is not None else slack_col[i]
        y = float(p2[col])
        if flipped[i]:
            y = -y
        duals.append(y)
    diagnostics = []
    worst = _primal_violation(model, assignment)
    if worst > eps * scale * 10:
        diagnostics.append(f"primal residual {worst:.3e} exceeds tolerance")
    return LpSolution(
        status=OPTIMAL,
        value=float(p2[ncols]),
        assignment=assignment,
        duals=duals,
        backend="float",
        pivots=pivots,
        diagnostics=diagnostics,
    )


# ----------------------------------------------------------- verification ---


def _primal_violation(model: LpModel, assignment: dict) -> float:
    worst = 0.0
    for con in model.constraints:
        lhs = sum(float(coef) * float(assignment.get(var, 0)) for var, coef in con.terms.items())
        gap = lhs - float(con.rhs)
        worst = max(worst, gap if con.rel == LE else abs(gap))
    for var in model.variables:
        worst = max(worst, -float(assignment.get(var, 0)))
    return worst


def verify_solution(model: LpModel, sol: LpSolution, eps: float = 0) -> bool:
    """Independent optimality certificate: primal feasibility, dual
    feasibility, and matching objective values (weak duality). Exact when
    eps is 0 and the solution carries rationals."""
    if sol.status != OPTIMAL:
        return False
    exact = eps == 0

    def val(x):
        return x if exact else float(x)

    assignment = {v: val(sol.assignment.get(v, 0)) for v in model.variables}
    for var in model.variables:
        if assignment[var] < -eps:
            return False
    for con in model.constraints:
        lhs = sum(val(coef) * assignment[var] for var, coef in con.terms.items())
        if con.rel == LE and lhs > val(con.rhs) + eps:
            return False
        if con.rel == EQ and abs(lhs - val(con.rhs)) > eps:
            return False
    primal = sum(val(coef) * assignment[var] for var, coef in model.objective.items())
    if abs(primal - val(sol.value)) > eps:
        return False
    if len(sol.duals) != len(model.constraints):
        return False
    duals = [val(y) for y in sol.duals]
    for y, con in zip(duals, model.constraints):
        if con.rel == LE and y < -eps:
            return False
    reduced = {v: -val(model.objective.get(v, 0)) for v in model.variables}
    for y, con in zip(duals, model.constraints):
        for var, coef in con.terms.items():
            reduced[var] += y * val(coef)
    slack_tol = eps * (1 + max((abs(d) for d in duals), default=0))
    for var in model.variables:
        if reduced[var] < -slack_tol:
            return False
    dual_value = sum(y * val(con.rhs) for y, con in zip(duals, model.constraints))
    if exact:
        return dual_value == sol.value
    return abs(dual_value - val(sol.value)) <= eps * (1 + abs(dual_value))


def verify_ray(model: LpModel, sol: LpSolution, eps: float = 0) -> bool:
    """Check an unboundedness certificate: a feasible improving direction."""
    if sol.status != UNBOUNDED or not sol.ray:
        return False
    ray = {v: sol.ray.get(v, 0) for v in model.variables}
    if any(x < -eps for x in ray.values()):
        return False
    for con in model.constraints:
        move = sum(coef * ray.get(var, 0) for var, coef in con.terms.items())
        if con.rel == LE and move > eps:
            return False
        if con.rel == EQ and abs(move) > eps:
            return False
    gain = sum(coef * ray.get(var, 0) for var, coef in model.objective.items())
    return gain > eps


# ----------------------------------------------------------------- oracle ---


def _gauss_solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Solve a square rational system; None when singular."""
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot_row is None:
            return None
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def vertex_enumeration_optimum(model: LpModel) -> LpSolution:
    """Brute-force optimum for small models: evaluate the objective at every
    vertex of the feasible region (x >= 0 keeps it pointed, so an optimum at
    a vertex exists whenever the LP is feasible and bounded).

    Deliberately shares nothing with the simplex path; used as an oracle.
    """
    n = len(model.variables)
    index = {v: j for j, v in enumerate(model.variables)}
    rows = []
    for con in model.constraints:
        a = [Fraction(0)] * n
        for var, coef in con.terms.items():
            a[index[var]] += Fraction(coef)
        rows.append((a, con.rel, Fraction(con.rhs)))
    for j in range(n):
        bound = [Fraction(0)] * n
        bound[j] = Fraction(-1)
        rows.append((bound, LE, Fraction(0)))
    obj = [Fraction(model.objective.get(v, 0)) for v in model.variables]

    best = None
    best_point = None
    for combo in itertools.combinations(range(len(rows)), n):
        matrix = [rows[k][0] for k in combo]
        rhs = [rows[k][2] for k in combo]
        point = _gauss_solve(matrix, rhs)
        if point is None:
            continue
        ok = all(x >= 0 for x in point)
        if ok:
            for a, rel, b in rows:
                lhs = sum(ai * xi for ai, xi in zip(a, point))
                if rel == LE and lhs > b:
                    ok = False
                    break
                if rel == EQ and lhs != b:
                    ok = False
                    break
        if not ok:
            continue
        value = sum(c * x for c, x in zip(obj, point))
        if best is None or value > best:
            best = value
            best_point = point
    if best is None:
        return LpSolution(status=INFEASIBLE, backend="oracle")
    assignment = {v: best_point[j] for v, j in index.items() if best_point[j] != 0}
    return LpSolution(status=OPTIMAL, value=best, assignment=assignment, backend="oracle")
