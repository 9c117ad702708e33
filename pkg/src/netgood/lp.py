"""Exact rational linear feasibility.

A sparse two-phase primal simplex over exact rationals (``gmpy2.mpq`` when
available, ``fractions.Fraction`` otherwise).  Systems mix equalities,
non-strict and strict inequalities; strictness is handled by maximising a
common slack ``t`` on the strict rows, and infeasibility is explained by a
Farkas/Motzkin multiplier vector that a few lines of arithmetic can check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

EQ, GE, GT = "=", ">=", ">"
_SENSES = (EQ, GE, GT)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass
class LinearConstraint:
    """``sum(coeffs[v] * v) <sense> rhs`` with sense in ``=``, ``>=``, ``>``."""

    key: Hashable
    coeffs: dict
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise ValueError(f"bad sense {self.sense!r}")
        self.coeffs = {v: Fraction(a) for v, a in self.coeffs.items() if a != 0}
        self.rhs = Fraction(self.rhs)

    @property
    def strict(self) -> bool:
        return self.sense == GT


@dataclass
class SlackResult:
    feasible: bool
    slack: Fraction | None
    point: dict | None
    certificate: dict | None = None   # Farkas multipliers by key when infeasible


class Unbounded(ArithmeticError):
    pass


class _Tableau:
    """Sparse tableau: rows are ``{col: coeff}`` dicts that include the basic
    column; ``colrows`` indexes which rows mention each column."""

    # consecutive degenerate pivots tolerated (plus the row count) before
    # switching to Bland's rule; switching early causes heavy fill-in
    DEGENERATE_LIMIT = 1000

    def __init__(self, rows: list[dict], rhs: list, ncols: int):
        self.rows = rows
        self.rhs = rhs
        self.ncols = ncols
        self.basis: list[int] = []
        self.colrows: dict[int, set] = {}
        self.obj: dict = {}
        self.z = _Q(0)
        self.bland = False
        self.pivots = 0
        # row r of the starting basis is the unit vector of column unit[r];
        # the input row was multiplied by scale[r] to make it so
        self.unit: list[int] = []
        self.scale: list = []
        self.barrier: int | None = None   # artificial columns may not re-enter

    def _index(self) -> None:
        self.colrows = {}
        for r, row in enumerate(self.rows):
            for col in row:
                self.colrows.setdefault(col, set()).add(r)

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        b_r = self.rhs[r]
        items = list(row.items())
        colrows = self.colrows
        for k in list(colrows[c]):
            if k == r:
                continue
            other = self.rows[k]
            f = other[c]
            for col, val in items:
                nv = other.get(col, 0) - f * val
                if nv:
                    if col not in other:
                        colrows.setdefault(col, set()).add(k)
                    other[col] = nv
                elif col in other:
                    del other[col]
                    colrows[col].discard(k)
            self.rhs[k] -= f * b_r
        f = self.obj.get(c)
        if f is not None:
            obj = self.obj
            for col, val in items:
                nv = obj.get(col, 0) - f * val
                if nv:
                    obj[col] = nv
                else:
                    obj.pop(col, None)
            self.z += f * b_r
        self.basis[r] = c
        self.pivots += 1

    def _entering(self) -> int | None:
        best, best_val = None, None
        barrier = self.barrier
        for col, val in self.obj.items():
            if val <= 0 or (barrier is not None and col >= barrier):
                continue
            if self.bland:
                if best is None or col < best:
                    best = col
            elif best is None or val > best_val or (val == best_val and col < best):
                best, best_val = col, val
        return best

    def _leaving(self, c: int) -> int | None:
        best, best_ratio = None, None
        for r in self.colrows.get(c, ()):
            a = self.rows[r][c]
            if a <= 0:
                continue
            ratio = self.rhs[r] / a
            if (best is None or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[r] < self.basis[best])):
                best, best_ratio = r, ratio
        return best

    def optimize(self) -> None:
        degenerate = 0
        while True:
            c = self._entering()
            if c is None:
                return
            r = self._leaving(c)
            if r is None:
                raise Unbounded("objective unbounded")
            if self.rhs[r] == 0:
                degenerate += 1
                if degenerate > self.DEGENERATE_LIMIT + len(self.rows):
                    self.bland = True
            else:
                degenerate = 0
            self.pivot(r, c)

    def phase1(self) -> bool:
        """Find a feasible basis of ``rows x = rhs, x >= 0`` (rhs >= 0).

        Columns occurring in a single row with a positive coefficient start
        basic there; remaining rows get artificial columns.  Artificials stay
        in the tableau afterwards (barred from entering) so that the basis
        inverse, and with it the dual vector, remains readable.
        """
        art0 = self.ncols
        count: dict[int, int] = {}
        for row in self.rows:
            for col in row:
                count[col] = count.get(col, 0) + 1
        self.basis, self.unit, self.scale = [], [], []
        self.obj = {}
        self.z = _Q(0)
        for i, row in enumerate(self.rows):
            crash = next((col for col in sorted(row) if count[col] == 1 and row[col] > 0), None)
            if crash is None:
                for col, val in row.items():
                    self.obj[col] = self.obj.get(col, 0) + val
                row[art0 + i] = _Q(1)
                self.basis.append(art0 + i)
                self.scale.append(_Q(1))
                self.z -= self.rhs[i]
            else:
                inv = 1 / row[crash]
                if inv != 1:
                    for k in row:
                        row[k] *= inv
                    self.rhs[i] *= inv
                self.basis.append(crash)
                self.scale.append(inv)
        self.unit = list(self.basis)
        self.phase1_cost = {col: _Q(-1) for col in self.basis if col >= art0}
        self.obj = {k: v for k, v in self.obj.items() if v}
        self._index()
        self.optimize()
        self.barrier = art0
        if self.z != 0:
            return False
        for r in range(len(self.rows)):
            if self.basis[r] >= art0:
                # degenerate artificial: swap in any structural column of the
                # row; a row without one is redundant and keeps its artificial
                col = next((k for k in sorted(self.rows[r]) if k < art0), None)
                if col is not None:
                    self.pivot(r, col)
        return True

    def duals(self, cost: Mapping[int, object]) -> list:
        """``y = c_B B^-1`` for the current basis, one entry per input row
        (in the scaled row system)."""
        return [_Q(cost.get(u, 0)) - self.obj.get(u, 0) for u in self.unit]

    def phase2(self, objective: Mapping[int, object]) -> None:
        self.bland = False
        obj = {c: _Q(v) for c, v in objective.items() if v}
        z = _Q(0)
        for r, row in enumerate(self.rows):
            cb = obj.get(self.basis[r])
            if not cb:
                continue
            for col, val in row.items():
                obj[col] = obj.get(col, 0) - cb * val
            z += cb * self.rhs[r]
        self.obj = {k: v for k, v in obj.items() if v}
        self.z = z
        self.optimize()

    def values(self) -> dict[int, object]:
        return {b: self.rhs[r] for r, b in enumerate(self.basis)}


class _StandardForm:
    """Translate constraints over free/nonnegative variables into ``Ax = b, x >= 0``."""

    def __init__(self, constraints: Sequence[LinearConstraint], with_slack: bool):
        self.nonneg = {next(iter(con.coeffs)) for con in constraints if self._is_bound(con)}
        self._ncols = 0
        self.cols: dict = {}
        self.variables = []
        for con in constraints:
            for v in con.coeffs:
                if v not in self.cols:
                    self.variables.append(v)
                    if v in self.nonneg:
                        self.cols[v] = (self._new(),)
                    else:
                        self.cols[v] = (self._new(), self._new())
        self.has_strict = with_slack and any(c.strict for c in constraints)
        self.t_col = self._new() if self.has_strict else None
        rows, rhs = [], []
        self.row_src: list = []   # constraint index per row; None for t <= 1
        for idx, con in enumerate(constraints):
            if con.sense == GE and self._is_bound(con):
                continue
            row: dict = {}
            for v, a in con.coeffs.items():
                cs = self.cols[v]
                row[cs[0]] = row.get(cs[0], 0) + _Q(a)
                if len(cs) == 2:
                    row[cs[1]] = row.get(cs[1], 0) - _Q(a)
            if con.strict and self.has_strict:
                row[self.t_col] = _Q(-1)
            if con.sense != EQ:
                row[self._new()] = _Q(-1)
            rows.append({k: v for k, v in row.items() if v})
            rhs.append(_Q(con.rhs))
            self.row_src.append(idx)
        if self.has_strict:
            rows.append({self.t_col: _Q(1), self._new(): _Q(1)})
            rhs.append(_Q(1))
            self.row_src.append(None)
        self.sign = []
        for i, b in enumerate(rhs):
            self.sign.append(-1 if b < 0 else 1)
            if b < 0:
                rhs[i] = -b
                rows[i] = {k: -v for k, v in rows[i].items()}
        self.rows, self.rhs = rows, rhs

    @staticmethod
    def _is_bound(con: LinearConstraint) -> bool:
        """``x >= 0`` or ``x > 0`` (any positive coefficient)."""
        return (con.sense in (GE, GT) and con.rhs == 0 and len(con.coeffs) == 1
                and next(iter(con.coeffs.values())) > 0)

    def _new(self) -> int:
        self._ncols += 1
        return self._ncols - 1

    @property
    def ncols(self) -> int:
        return self._ncols

    def point(self, vals: Mapping[int, object]) -> dict:
        out = {}
        for v in self.variables:
            cs = self.cols[v]
            x = vals.get(cs[0], 0)
            if len(cs) == 2:
                x = x - vals.get(cs[1], 0)
            out[v] = _to_fraction(_Q(x))
        return out


def _certificate(constraints: Sequence[LinearConstraint], sf: "_StandardForm",
                 tab: _Tableau, cost: Mapping[int, object]) -> dict | None:
    """Turn the final duals of an infeasible (phase 1) or zero-slack (phase 2)
    tableau into multipliers over ``constraints``.

    At such an optimum ``-y`` satisfies ``-y.A <= 0`` on every real column
    with ``-y.b > 0``, or ``-y.b = 0`` and weight at least one on ``t``; the
    ``t <= 1`` row can only strengthen the contradiction and is dropped.
    Variable-sign bounds absorb whatever the other rows leave over.
    """
    y = tab.duals(cost)
    mult: dict[int, object] = {}
    for r, idx in enumerate(sf.row_src):
        if idx is None:
            continue
        u = -y[r] * tab.scale[r] * sf.sign[r]
        if u:
            mult[idx] = mult.get(idx, 0) + u
    residual: dict = {}
    for idx, u in mult.items():
        for v, a in constraints[idx].coeffs.items():
            residual[v] = residual.get(v, 0) + u * _Q(a)
    bounds = {}
    for idx, con in enumerate(constraints):
        if sf._is_bound(con):
            bounds.setdefault(next(iter(con.coeffs)), idx)
    for v, rsum in residual.items():
        if rsum and v in bounds:
            idx = bounds[v]
            mult[idx] = mult.get(idx, 0) - rsum / _Q(constraints[idx].coeffs[v])
    out = {constraints[idx].key: _to_fraction(_Q(u)) for idx, u in mult.items() if u}
    if not check_farkas(constraints, out):
        return None
    # same normalisation as the alternative-system solver
    weight = sum(u * (constraints[idx].rhs + constraints[idx].strict)
                 for idx, u in ((i, _to_fraction(_Q(u))) for i, u in mult.items()))
    return {k: v / weight for k, v in out.items()}


def max_slack(constraints: Sequence[LinearConstraint]) -> SlackResult:
    """Decide feasibility of a mixed strict/non-strict system.

    Maximises ``t`` subject to ``a.x - t >= b`` on strict rows, ``0 <= t <= 1``.
    The strict system is feasible iff the non-strict part is and ``t* > 0``.
    An infeasible result carries Farkas multipliers read off the final basis.
    """
    sf = _StandardForm(constraints, with_slack=True)
    tab = _Tableau(sf.rows, sf.rhs, sf.ncols)
    if not tab.phase1():
        return SlackResult(False, None, None, _certificate(constraints, sf, tab, tab.phase1_cost))
    if not sf.has_strict:
        return SlackResult(True, None, sf.point(tab.values()))
    objective = {sf.t_col: 1}
    tab.phase2(objective)
    vals = tab.values()
    t = _to_fraction(_Q(vals.get(sf.t_col, 0)))
    if t > 0:
        return SlackResult(True, t, sf.point(vals))
    return SlackResult(False, t, sf.point(vals), _certificate(constraints, sf, tab, objective))


def maximize(objective: Mapping, constraints: Sequence[LinearConstraint]):
    """Maximise ``objective`` (``{var: coeff}``) over a non-strict system.

    Returns ``(value, point)`` or ``None`` when infeasible; raises Unbounded.
    """
    if any(c.strict for c in constraints):
        raise ValueError("maximize() takes non-strict constraints only")
    sf = _StandardForm(constraints, with_slack=False)
    tab = _Tableau(sf.rows, sf.rhs, sf.ncols)
    if not tab.phase1():
        return None
    col_obj: dict = {}
    for v, a in objective.items():
        cs = sf.cols.get(v)
        if cs is None:
            raise ValueError(f"objective variable {v!r} appears in no constraint")
        col_obj[cs[0]] = col_obj.get(cs[0], 0) + _Q(a)
        if len(cs) == 2:
            col_obj[cs[1]] = col_obj.get(cs[1], 0) - _Q(a)
    tab.phase2(col_obj)
    return _to_fraction(tab.z), sf.point(tab.values())


def farkas(constraints: Sequence[LinearConstraint]) -> dict | None:
    """Multipliers proving infeasibility, or None if the system is feasible."""
    res = max_slack(constraints)
    if res.feasible:
        return None
    return res.certificate if res.certificate is not None else farkas_dual(constraints)


def farkas_dual(constraints: Sequence[LinearConstraint]) -> dict | None:
    """Multipliers proving infeasibility, found by solving the alternative system.

    Finds ``y`` (free on equalities, >= 0 otherwise) with ``sum y_k a_k = 0``
    and either ``sum y_k b_k > 0``, or ``sum y_k b_k = 0`` with some strict
    row weighted positively.  Normalised by ``sum y b + sum_strict y = 1``.
    """
    yvars = []
    dual: list[LinearConstraint] = []
    by_var: dict = {}
    for idx, con in enumerate(constraints):
        y = ("y", idx)
        yvars.append(y)
        if con.sense != EQ:
            dual.append(LinearConstraint(("sign", idx), {y: 1}, GE, 0))
        for v, a in con.coeffs.items():
            by_var.setdefault(v, {})[y] = a
    for v, coeffs in by_var.items():
        dual.append(LinearConstraint(("cancel", v), coeffs, EQ, 0))
    b_row = {("y", i): c.rhs for i, c in enumerate(constraints) if c.rhs}
    dual.append(LinearConstraint("rhs", b_row, GE, 0))
    norm = dict(b_row)
    for i, c in enumerate(constraints):
        if c.strict:
            norm[("y", i)] = norm.get(("y", i), 0) + 1
    if not norm:
        return None
    dual.append(LinearConstraint("norm", norm, EQ, 1))
    res = max_slack(dual)
    if not res.feasible:
        return None
    return {constraints[y[1]].key: val for y, val in res.point.items() if val}


def check_farkas(constraints: Iterable[LinearConstraint], multipliers: Mapping) -> bool:
    by_key = {c.key: c for c in constraints}
    total: dict = {}
    b = Fraction(0)
    strict_weight = Fraction(0)
    for key, y in multipliers.items():
        con = by_key.get(key)
        if con is None:
            return False
        y = Fraction(y)
        if con.sense != EQ and y < 0:
            return False
        for v, a in con.coeffs.items():
            total[v] = total.get(v, 0) + y * a
        b += y * con.rhs
        if con.strict:
            strict_weight += y
    if any(total.values()):
        return False
    return b > 0 or (b == 0 and strict_weight > 0)
