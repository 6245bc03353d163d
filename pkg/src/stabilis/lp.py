"""Exact linear programming over the rationals.

Two-phase tableau simplex with Bland's pivoting rule, so it terminates on
degenerate problems without any perturbation. Problems here are tiny (tens
of variables), so the dense tableau is fine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from stabilis.rational import exact, fast, to_rational

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)
_QZERO = fast(0)
_QONE = fast(1)


@dataclass
class LinearProgram:
    """``sense`` objective . x subject to rows ``(coefs, rel, rhs)``.

    ``rel`` is one of ``"<="``, ``"=="``, ``">="``. ``bounds[j]`` is a
    ``(lower, upper)`` pair where ``None`` means unbounded on that side; the
    default for every variable is ``(0, None)``.
    """

    objective: Sequence
    constraints: list = field(default_factory=list)
    sense: str = "max"
    bounds: Optional[list] = None

    def __post_init__(self):
        self.objective = [to_rational(c) for c in self.objective]
        n = len(self.objective)
        rows = []
        for coefs, rel, rhs in self.constraints:
            if len(coefs) != n:
                raise ValueError(f"constraint has {len(coefs)} coefficients, expected {n}")
            if rel not in ("<=", "==", ">="):
                raise ValueError(f"unknown relation {rel!r}")
            rows.append(([to_rational(c) for c in coefs], rel, to_rational(rhs)))
        self.constraints = rows
        if self.sense not in ("max", "min"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if self.bounds is None:
            self.bounds = [(_ZERO, None)] * n
        if len(self.bounds) != n:
            raise ValueError("one bound pair per variable expected")
        self.bounds = [
            (None if lo is None else to_rational(lo), None if hi is None else to_rational(hi))
            for lo, hi in self.bounds
        ]

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, coefs, rel, rhs) -> None:
        if len(coefs) != self.num_vars:
            raise ValueError(f"constraint has {len(coefs)} coefficients, expected {self.num_vars}")
        self.constraints.append(([to_rational(c) for c in coefs], rel, to_rational(rhs)))

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        for j, (lo, hi) in enumerate(self.bounds):
            if lo is not None and point[j] < lo:
                return False
            if hi is not None and point[j] > hi:
                return False
        for coefs, rel, rhs in self.constraints:
            lhs = sum((c * v for c, v in zip(coefs, point) if c), _ZERO)
            if rel == "<=" and lhs > rhs or rel == ">=" and lhs < rhs or rel == "==" and lhs != rhs:
                return False
        return True


@dataclass
class LpOutcome:
    status: str
    point: Optional[tuple] = None
    value: Optional[Fraction] = None
    pivots: int = 0

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, e: int, obj: list[Fraction]) -> None:
        row = self.rows[r]
        p = row[e]
        if p != 1:
            row = [v / p if v else v for v in row]
            self.rows[r] = row
        nz = [j for j, v in enumerate(row) if v]
        for k, other in enumerate(self.rows):
            if k != r:
                f = other[e]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        f = obj[e]
        if f:
            for j in nz:
                obj[j] -= f * row[j]
        self.basis[r] = e
        self.pivots += 1

    def reduced_costs(self, cost: list[Fraction], ncols: int) -> list[Fraction]:
        # obj[j] = c_j - c_B . column_j; obj[-1] = -(current value)
        obj = list(cost[:ncols]) + [_QZERO]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for j, v in enumerate(self.rows[r]):
                    if v:
                        obj[j] -= cb * v
        return obj

    def optimize(self, cost: list[Fraction], allowed: int) -> bool:
        """Maximize; columns >= ``allowed`` never enter. False if unbounded."""
        obj = self.reduced_costs(cost, len(self.rows[0]) - 1 if self.rows else len(cost))
        while True:
            e = next((j for j in range(allowed) if obj[j] > 0), None)
            if e is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[e]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], e, obj)


def _standard_form(lp: LinearProgram):
    """Rewrite as ``max c.z, A z (rel) b, z >= 0``; return the map back to x."""
    # each original variable becomes offset + sum(sign * z_col)
    var_map = []
    ncols = 0
    q = fast
    extra_rows = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            var_map.append((q(lo), [(ncols, 1)]))
            if hi is not None:
                if hi < lo:
                    return None
                extra_rows.append(({ncols: _QONE}, "<=", q(hi - lo)))
            ncols += 1
        elif hi is not None:
            var_map.append((q(hi), [(ncols, -1)]))
            ncols += 1
        else:
            var_map.append((_QZERO, [(ncols, 1), (ncols + 1, -1)]))
            ncols += 2
    sign = 1 if lp.sense == "max" else -1
    cost = [_QZERO] * ncols
    for j, c in enumerate(lp.objective):
        for col, s in var_map[j][1]:
            cost[col] += sign * s * q(c)
    rows = []
    for coefs, rel, rhs in lp.constraints:
        new = {}
        shift = q(rhs)
        for j, c in enumerate(coefs):
            if c:
                c = q(c)
                off, cols = var_map[j]
                shift -= c * off
                for col, s in cols:
                    new[col] = new.get(col, _QZERO) + s * c
        rows.append((new, rel, shift))
    rows.extend(extra_rows)
    return var_map, ncols, cost, rows


def simplex_solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly. Status is optimal, infeasible or unbounded."""
    std = _standard_form(lp)
    if std is None:
        return LpOutcome(INFEASIBLE)
    var_map, nstruct, cost, rows = std

    # slack columns, then artificials
    nslack = sum(1 for _, rel, _ in rows if rel != "==")
    ncols = nstruct + nslack
    dense = []
    basis = []
    needs_art = []
    s = nstruct
    for k, (coefs, rel, rhs) in enumerate(rows):
        row = [_QZERO] * (ncols + 1)
        for col, v in coefs.items():
            row[col] = v
        slack = None
        if rel != "==":
            row[s] = _QONE if rel == "<=" else -_QONE
            slack = s
            s += 1
        row[-1] = rhs
        if rhs < 0:
            row = [-v for v in row]
        dense.append(row)
        if slack is not None and row[slack] == 1:
            basis.append(slack)
        else:
            basis.append(None)
            needs_art.append(k)

    nart = len(needs_art)
    total = ncols + nart
    for k, row in enumerate(dense):
        rhs = row.pop()
        row.extend([_QZERO] * nart)
        row.append(rhs)
    for a, k in enumerate(needs_art):
        dense[k][ncols + a] = _QONE
        basis[k] = ncols + a

    tab = _Tableau(dense, basis)
    if nart:
        phase1 = [_QZERO] * ncols + [-_QONE] * nart
        tab.optimize(phase1, total)
        infeas = sum(row[-1] for row, b in zip(tab.rows, tab.basis) if b >= ncols)
        if infeas > 0:
            return LpOutcome(INFEASIBLE, pivots=tab.pivots)
        # drive zero-valued artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= ncols:
                e = next((j for j in range(ncols) if tab.rows[r][j]), None)
                if e is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, e, [_QZERO] * (total + 1))
            r += 1
        for row in tab.rows:
            rhs = row[-1]
            del row[ncols:]
            row.append(rhs)

    full_cost = cost + [_QZERO] * nslack
    if not tab.optimize(full_cost, ncols):
        return LpOutcome(UNBOUNDED, pivots=tab.pivots)

    z = [_QZERO] * ncols
    for row, b in zip(tab.rows, tab.basis):
        z[b] = row[-1]
    point = []
    for off, cols in var_map:
        point.append(exact(off + sum((sgn * z[col] for col, sgn in cols), _QZERO)))
    value = sum((c * v for c, v in zip(lp.objective, point) if c), _ZERO)
    return LpOutcome(OPTIMAL, tuple(point), value, tab.pivots)


def feasibility(
    num_vars: int,
    constraints: list,
    bounds: Optional[list] = None,
) -> LpOutcome:
    """Find a point satisfying ``constraints`` (zero-objective LP)."""
    return simplex_solve(LinearProgram([_ZERO] * num_vars, list(constraints), "max", bounds))


def zero_sum_value(payoff) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Value and a maximin row strategy of the matrix game ``payoff``.

    Solves ``max z  s.t.  x^T M >= z 1^T,  sum(x) = 1,  x >= 0`` with ``z``
    free. The row player is the maximizer.
    """
    m = [[to_rational(v) for v in row] for row in payoff]
    if not m or not m[0]:
        raise ValueError("empty payoff matrix")
    nrows, ncols = len(m), len(m[0])
    if any(len(row) != ncols for row in m):
        raise ValueError("ragged payoff matrix")
    n = nrows + 1
    lp = LinearProgram(
        [_ZERO] * nrows + [_ONE],
        bounds=[(_ZERO, None)] * nrows + [(None, None)],
    )
    for c in range(ncols):
        lp.add([m[r][c] for r in range(nrows)] + [-_ONE], ">=", 0)
    lp.add([_ONE] * nrows + [_ZERO], "==", 1)
    out = simplex_solve(lp)
    assert out.status == OPTIMAL and len(out.point) == n
    return out.value, out.point[:nrows]
