"""Small exact mixed-integer linear programming kernel.

Three entry points with deliberately independent solution paths:

- :func:`solve_lp_relaxation`: bounded-variable two-phase primal
  simplex (dense, revised, Bland's-rule fallback for anti-cycling).
- :func:`solve_exact`: branch and bound over the LP relaxation with
  best-bound node selection, most-fractional branching, and an initial
  depth-first dive until the first incumbent.
- :func:`solve_enumerate`: chunked exhaustive enumeration of every
  integer assignment, used as an oracle against ``solve_exact``.

Everything is deterministic: identical models produce identical pivots,
node orders, and solutions on every run.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "VariableDef",
    "LinearConstraint",
    "IPModel",
    "Solution",
    "SolverError",
    "solve_lp_relaxation",
    "solve_exact",
    "solve_enumerate",
]

BINARY = "binary"
INTEGER = "integer"
CONTINUOUS = "continuous"

_FEAS_TOL = 1e-6  # reported feasibility tolerance
_INT_TOL = 1e-6  # integrality tolerance
_DUAL_TOL = 1e-9
_PIVOT_TOL = 1e-10
_REFACTOR_EVERY = 64
_STALL_LIMIT = 100


class SolverError(RuntimeError):
    """Internal solver failure (iteration cap, numerical breakdown)."""


@dataclass(frozen=True)
class VariableDef:
    id: int
    name: str
    kind: str
    lower: float
    upper: float


@dataclass(frozen=True)
class LinearConstraint:
    ids: tuple[int, ...]
    coefs: tuple[float, ...]
    sense: str  # "<=", ">=", "=="
    rhs: float
    name: str = ""


@dataclass
class Solution:
    status: str  # optimal | infeasible | unbounded | node_limit
    objective: float | None
    assignment: np.ndarray | None
    nodes_explored: int = 0

    def value(self, model: "IPModel", name: str) -> float:
        if self.assignment is None:
            raise ValueError("solution carries no assignment")
        return float(self.assignment[model.variable_id(name)])


class IPModel:
    """Minimization model over named bounded variables."""

    def __init__(self, name: str = "model") -> None:
        self.name = name
        self.variables: list[VariableDef] = []
        self.constraints: list[LinearConstraint] = []
        self.objective_constant = 0.0
        self._objective: dict[int, float] = {}
        self._by_name: dict[str, int] = {}

    # -- construction ---------------------------------------------------

    def add_variable(
        self,
        name: str,
        kind: str = CONTINUOUS,
        lower: float = 0.0,
        upper: float = math.inf,
    ) -> int:
        if kind not in (BINARY, INTEGER, CONTINUOUS):
            raise ValueError(f"unknown variable kind {kind!r}")
        if name in self._by_name:
            raise ValueError(f"duplicate variable name {name!r}")
        if kind == BINARY:
            lower, upper = max(0.0, lower), min(1.0, upper)
        if not lower <= upper:
            raise ValueError(f"empty bound interval for {name!r}: [{lower}, {upper}]")
        vid = len(self.variables)
        self.variables.append(VariableDef(vid, name, kind, float(lower), float(upper)))
        self._by_name[name] = vid
        return vid

    def add_constraint(
        self,
        terms: Iterable[tuple[int, float]],
        sense: str,
        rhs: float,
        name: str = "",
    ) -> None:
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown sense {sense!r}")
        merged: dict[int, float] = {}
        for vid, coef in terms:
            if not 0 <= vid < len(self.variables):
                raise ValueError(f"constraint references unknown variable id {vid}")
            if not math.isfinite(coef):
                raise ValueError(f"non-finite coefficient {coef} for variable {vid}")
            merged[vid] = merged.get(vid, 0.0) + float(coef)
        if not math.isfinite(rhs):
            raise ValueError(f"non-finite right-hand side {rhs}")
        items = sorted((vid, c) for vid, c in merged.items() if c != 0.0)
        self.constraints.append(
            LinearConstraint(
                ids=tuple(v for v, _ in items),
                coefs=tuple(c for _, c in items),
                sense=sense,
                rhs=float(rhs),
                name=name,
            )
        )

    def add_objective_term(self, vid: int, coef: float) -> None:
        if not 0 <= vid < len(self.variables):
            raise ValueError(f"objective references unknown variable id {vid}")
        if not math.isfinite(coef):
            raise ValueError(f"non-finite objective coefficient {coef}")
        self._objective[vid] = self._objective.get(vid, 0.0) + float(coef)

    def add_objective_constant(self, value: float) -> None:
        """Decision-independent cost carried through every solve path."""
        if not math.isfinite(value):
            raise ValueError(f"non-finite objective constant {value}")
        self.objective_constant += float(value)

    def variable_id(self, name: str) -> int:
        return self._by_name[name]

    # -- views ----------------------------------------------------------

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(len(self.variables))
        for vid, coef in self._objective.items():
            c[vid] = coef
        return c

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([v.lower for v in self.variables])
        up = np.array([v.upper for v in self.variables])
        return lo, up

    def constraint_matrix(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        m, n = len(self.constraints), len(self.variables)
        a = np.zeros((m, n))
        b = np.zeros(m)
        senses = []
        for i, con in enumerate(self.constraints):
            a[i, list(con.ids)] = con.coefs
            b[i] = con.rhs
            senses.append(con.sense)
        return a, b, senses

    def objective_value(self, x: np.ndarray) -> float:
        return float(np.dot(self.objective_vector(), x)) + self.objective_constant

    def max_violation(self, x: np.ndarray) -> float:
        worst = 0.0
        for con in self.constraints:
            lhs = float(np.dot(np.asarray(con.coefs), x[list(con.ids)]))
            if con.sense == "<=":
                worst = max(worst, lhs - con.rhs)
            elif con.sense == ">=":
                worst = max(worst, con.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - con.rhs))
        return worst

    # -- dump -----------------------------------------------------------

    def to_lp_text(self) -> str:
        """LP-format-style dump (human-oriented; names kept verbatim)."""

        def fmt(value: float) -> str:
            return f"{value:.12g}"

        def row(ids: Sequence[int], coefs: Sequence[float]) -> str:
            parts = []
            for vid, coef in zip(ids, coefs):
                sign = "-" if coef < 0 else "+"
                parts.append(f"{sign} {fmt(abs(coef))} {self.variables[vid].name}")
            text = " ".join(parts) if parts else "0"
            return text[2:] if text.startswith("+ ") else text

        lines = [f"\\ {self.name}", "Minimize"]
        obj_items = sorted(self._objective.items())
        obj_text = row([v for v, _ in obj_items], [c for _, c in obj_items])
        if self.objective_constant:
            obj_text += f" + {fmt(self.objective_constant)}"
        lines.append(" obj: " + obj_text)
        lines.append("Subject To")
        for i, con in enumerate(self.constraints):
            label = con.name or f"c{i}"
            sense = {"<=": "<=", ">=": ">=", "==": "="}[con.sense]
            lines.append(f" {label}: {row(con.ids, con.coefs)} {sense} {fmt(con.rhs)}")
        lines.append("Bounds")
        for v in self.variables:
            lo = "-inf" if v.lower == -math.inf else fmt(v.lower)
            up = "+inf" if v.upper == math.inf else fmt(v.upper)
            lines.append(f" {lo} <= {v.name} <= {up}")
        generals = [v.name for v in self.variables if v.kind == INTEGER]
        binaries = [v.name for v in self.variables if v.kind == BINARY]
        if generals:
            lines.append("Generals")
            lines.extend(f" {name}" for name in generals)
        if binaries:
            lines.append("Binaries")
            lines.extend(f" {name}" for name in binaries)
        lines.append("End")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# bounded-variable two-phase primal simplex
# ---------------------------------------------------------------------------

_AT_LOWER = 0
_AT_UPPER = 1
_FREE = 2
_BASIC = 3


class _PreparedLP:
    """Dense standard form [A | I_slack | D_artificial] x = b, reusable
    across branch-and-bound nodes (only structural bounds change)."""

    def __init__(self, model: IPModel) -> None:
        a, b, senses = model.constraint_matrix()
        self.m, self.n = a.shape
        self.c_struct = model.objective_vector()
        self.senses = senses
        self.b = b
        n_total = self.n + 2 * self.m
        self.a_full = np.zeros((self.m, n_total))
        self.a_full[:, : self.n] = a
        self.a_full[:, self.n : self.n + self.m] = np.eye(self.m)
        self.slack_lo = np.zeros(self.m)
        self.slack_up = np.zeros(self.m)
        for i, sense in enumerate(senses):
            if sense == "<=":
                self.slack_lo[i], self.slack_up[i] = 0.0, math.inf
            elif sense == ">=":
                self.slack_lo[i], self.slack_up[i] = -math.inf, 0.0
            else:
                self.slack_lo[i], self.slack_up[i] = 0.0, 0.0

    def solve(self, lo_struct: np.ndarray, up_struct: np.ndarray):
        """Returns (status, x_struct, objective)."""
        m, n = self.m, self.n
        n_total = n + 2 * m
        lo = np.empty(n_total)
        up = np.empty(n_total)
        lo[:n], up[:n] = lo_struct, up_struct
        lo[n : n + m], up[n : n + m] = self.slack_lo, self.slack_up
        lo[n + m :], up[n + m :] = 0.0, math.inf

        status = np.empty(n_total, dtype=np.int8)
        x = np.zeros(n_total)
        for j in range(n):
            if lo[j] == -math.inf and up[j] == math.inf:
                status[j], x[j] = _FREE, 0.0
            elif lo[j] == -math.inf:
                status[j], x[j] = _AT_UPPER, up[j]
            elif up[j] == math.inf or abs(lo[j]) <= abs(up[j]):
                status[j], x[j] = _AT_LOWER, lo[j]
            else:
                status[j], x[j] = _AT_UPPER, up[j]
        for i in range(m):
            j = n + i
            status[j] = _AT_UPPER if self.senses[i] == ">=" else _AT_LOWER
            x[j] = 0.0

        residual = self.b - self.a_full[:, :n] @ x[:n]
        art_sign = np.where(residual >= 0.0, 1.0, -1.0)
        art_cols = np.arange(n + m, n_total)
        self.a_full[:, art_cols] = 0.0
        self.a_full[np.arange(m), art_cols] = art_sign

        basis = list(range(n + m, n_total))
        status[art_cols] = _BASIC
        x[art_cols] = np.abs(residual)
        b_inv = np.diag(art_sign).copy()

        c_phase1 = np.zeros(n_total)
        c_phase1[art_cols] = 1.0
        outcome = self._simplex(c_phase1, lo, up, basis, status, x, b_inv)
        if outcome == "unbounded":  # cannot happen for a bounded-below phase 1
            raise SolverError("phase-1 simplex reported unbounded")
        if float(c_phase1 @ x) > 1e-7:
            return "infeasible", None, None
        # pin artificials at zero for phase 2
        lo[art_cols] = 0.0
        up[art_cols] = 0.0
        x[art_cols] = np.where(status[art_cols] == _BASIC, x[art_cols], 0.0)

        c_phase2 = np.zeros(n_total)
        c_phase2[:n] = self.c_struct
        outcome = self._simplex(c_phase2, lo, up, basis, status, x, b_inv)
        if outcome == "unbounded":
            return "unbounded", None, None
        x_struct = np.clip(x[:n], lo_struct, up_struct)
        return "optimal", x_struct, float(self.c_struct @ x_struct)

    def _simplex(self, c, lo, up, basis, status, x, b_inv) -> str:
        """Run primal iterations to optimality on the current basis."""
        m = self.m
        a = self.a_full
        bland = False
        stall = 0
        z_prev = float(c @ x)
        max_iter = 20000 + 50 * (self.m + self.n)
        for iteration in range(max_iter):
            if iteration and iteration % _REFACTOR_EVERY == 0:
                basis_arr = np.asarray(basis)
                try:
                    b_inv[:, :] = np.linalg.inv(a[:, basis_arr])
                except np.linalg.LinAlgError as exc:
                    raise SolverError("singular basis during refactorization") from exc
                x_masked = x.copy()
                x_masked[basis_arr] = 0.0
                x[basis_arr] = b_inv @ (self.b - a @ x_masked)

            y = c[basis] @ b_inv
            d = c - y @ a
            movable = lo < up  # fixed variables can never improve
            at_lower = (status == _AT_LOWER) & (d < -_DUAL_TOL) & movable
            at_upper = (status == _AT_UPPER) & (d > _DUAL_TOL) & movable
            free = (status == _FREE) & (np.abs(d) > _DUAL_TOL)
            eligible = np.flatnonzero(at_lower | at_upper | free)
            if eligible.size == 0:
                return "optimal"
            if bland:
                enter = int(eligible[0])
            else:
                enter = int(eligible[np.argmax(np.abs(d[eligible]))])
            direction = 1.0 if d[enter] < 0 else -1.0

            w = b_inv @ a[:, enter]
            # entering variable's own bound gives one candidate step
            own_span = up[enter] - lo[enter]
            theta = own_span if math.isfinite(own_span) else math.inf
            leave_row = -1
            rates = -direction * w
            for i in range(m):
                rate = rates[i]
                k = basis[i]
                if rate > _PIVOT_TOL:
                    if up[k] == math.inf:
                        continue
                    step = (up[k] - x[k]) / rate
                elif rate < -_PIVOT_TOL:
                    if lo[k] == -math.inf:
                        continue
                    step = (x[k] - lo[k]) / (-rate)
                else:
                    continue
                if step < -1e-12:
                    step = 0.0
                better = step < theta - 1e-12
                tie = abs(step - theta) <= 1e-12
                if better or (
                    tie
                    and leave_row >= 0
                    and (
                        (bland and basis[i] < basis[leave_row])
                        or (not bland and abs(w[i]) > abs(w[leave_row]))
                    )
                ):
                    theta = min(step, theta)
                    leave_row = i
                elif tie and leave_row < 0:
                    theta = min(step, theta)
                    leave_row = i
            if theta == math.inf:
                return "unbounded"
            theta = max(theta, 0.0)

            x[basis] += -direction * theta * w
            x[enter] += direction * theta
            if leave_row < 0:
                # bound flip: entering moved to its opposite bound
                status[enter] = _AT_UPPER if direction > 0 else _AT_LOWER
                x[enter] = up[enter] if direction > 0 else lo[enter]
            else:
                leaving = basis[leave_row]
                rate = rates[leave_row]
                status[leaving] = _AT_UPPER if rate > 0 else _AT_LOWER
                x[leaving] = up[leaving] if rate > 0 else lo[leaving]
                basis[leave_row] = enter
                status[enter] = _BASIC
                pivot = w[leave_row]
                if abs(pivot) < _PIVOT_TOL:
                    raise SolverError("numerically zero pivot")
                row = b_inv[leave_row, :] / pivot
                b_inv -= np.outer(w, row)
                b_inv[leave_row, :] = row

            z = float(c @ x)
            if z < z_prev - 1e-12:
                stall = 0
            else:
                stall += 1
                if stall >= _STALL_LIMIT:
                    bland = True
            z_prev = z
        raise SolverError("simplex iteration limit exceeded")


def solve_lp_relaxation(model: IPModel) -> Solution:
    """Solve the continuous relaxation (integrality dropped)."""
    if model.num_variables == 0:
        return Solution(
            status="optimal", objective=model.objective_constant, assignment=np.zeros(0)
        )
    prepared = _PreparedLP(model)
    lo, up = model.bounds_arrays()
    status, x, obj = prepared.solve(lo, up)
    if status != "optimal":
        return Solution(status=status, objective=None, assignment=None)
    return Solution(
        status="optimal", objective=obj + model.objective_constant, assignment=x
    )


# ---------------------------------------------------------------------------
# branch and bound
# ---------------------------------------------------------------------------


@dataclass(order=True)
class _Node:
    bound: float
    seq: int
    lo: np.ndarray = field(compare=False)
    up: np.ndarray = field(compare=False)
    x: np.ndarray = field(compare=False)


def _fractional_index(
    x: np.ndarray, int_ids: np.ndarray, binary_mask: np.ndarray | None = None
) -> int | None:
    """Most fractional integer variable, or None if integral.

    Binaries outrank general integers: fixing an indicator usually
    collapses the linked counting variables through their big-M rows,
    while branching a count leaves the indicator free to go fractional
    again. Ties break toward the smallest variable id."""
    vals = x[int_ids]
    frac = np.abs(vals - np.round(vals))
    fractional = frac > _INT_TOL
    if not fractional.any():
        return None
    pick_from = fractional
    if binary_mask is not None:
        frac_bin = fractional & binary_mask
        if frac_bin.any():
            pick_from = frac_bin
    dist = np.where(pick_from, np.abs(frac - 0.5), math.inf)
    best = np.flatnonzero(dist == dist.min())
    return int(int_ids[best[0]])


def solve_exact(
    model: IPModel,
    node_limit: int | None = None,
    abs_gap: float = 1e-9,
    warm_start: np.ndarray | None = None,
) -> Solution:
    """Branch and bound to proven optimality (within ``abs_gap``).

    Best-bound node selection with a depth-first dive until the first
    incumbent; branching prefers fractional binaries over general
    integers. ``node_limit`` caps LP-solved nodes; hitting it returns
    the best incumbent found with status ``node_limit``.

    ``warm_start`` seeds the incumbent with a known feasible integer
    assignment so pruning starts at the root. It must satisfy every
    row to 1e-6; a violating warm start raises ``ValueError``.
    """
    int_ids = np.array(
        [v.id for v in model.variables if v.kind in (BINARY, INTEGER)], dtype=int
    )
    for vid in int_ids:
        v = model.variables[vid]
        if not (math.isfinite(v.lower) and math.isfinite(v.upper)):
            raise ValueError(f"integer variable {v.name!r} must have finite bounds")
    if int_ids.size == 0:
        return solve_lp_relaxation(model)
    binary_mask = np.array(
        [model.variables[vid].kind == BINARY for vid in int_ids], dtype=bool
    )

    prepared = _PreparedLP(model)
    lo0, up0 = model.bounds_arrays()
    # integral bound tightening
    lo0 = lo0.copy()
    up0 = up0.copy()
    lo0[int_ids] = np.ceil(lo0[int_ids] - 1e-9)
    up0[int_ids] = np.floor(up0[int_ids] + 1e-9)
    if np.any(lo0 > up0):
        return Solution(status="infeasible", objective=None, assignment=None)

    c = model.objective_vector()
    nodes = 0
    truncated = False  # set whenever the node budget cuts work short
    incumbent_obj = math.inf
    incumbent_x: np.ndarray | None = None

    def make_incumbent(x: np.ndarray) -> tuple[float, np.ndarray]:
        xi = x.copy()
        xi[int_ids] = np.round(xi[int_ids]) + 0.0  # +0.0 clears negative zero
        return float(np.dot(c, xi)), xi

    if warm_start is not None:
        xw = np.asarray(warm_start, dtype=float)
        if xw.shape != (model.num_variables,):
            raise ValueError(
                f"warm start has shape {xw.shape}, model expects ({model.num_variables},)"
            )
        frac_w = np.abs(xw[int_ids] - np.round(xw[int_ids]))
        if frac_w.size and float(frac_w.max()) > 1e-6:
            raise ValueError("warm start assigns non-integer values to integer variables")
        if np.any(xw < lo0 - 1e-6) or np.any(xw > up0 + 1e-6):
            raise ValueError("warm start violates variable bounds")
        if model.max_violation(xw) > 1e-6:
            raise ValueError("warm start violates model constraints")
        incumbent_obj, incumbent_x = make_incumbent(xw)

    status0, x0, obj0 = prepared.solve(lo0, up0)
    nodes += 1
    if status0 == "infeasible":
        return Solution(status="infeasible", objective=None, assignment=None, nodes_explored=nodes)
    if status0 == "unbounded":
        return Solution(status="unbounded", objective=None, assignment=None, nodes_explored=nodes)

    if incumbent_x is not None and obj0 >= incumbent_obj - abs_gap:
        # warm start already meets the root bound
        return Solution(
            status="optimal",
            objective=incumbent_obj + model.objective_constant,
            assignment=incumbent_x,
            nodes_explored=nodes,
        )

    seq = 0
    heap: list[_Node] = []
    root = _Node(bound=obj0, seq=seq, lo=lo0, up=up0, x=x0)
    seq += 1

    def expand(node: _Node, dive: bool) -> None:
        """Branch a node; children are LP-solved eagerly. In dive mode,
        keep descending into the better child until an incumbent shows
        up or the dive dies."""
        nonlocal nodes, seq, incumbent_obj, incumbent_x, truncated
        current = node
        while True:
            branch_id = _fractional_index(current.x, int_ids, binary_mask)
            if branch_id is None:
                obj_i, x_i = make_incumbent(current.x)
                if obj_i < incumbent_obj - 1e-15:
                    incumbent_obj, incumbent_x = obj_i, x_i
                return
            val = current.x[branch_id]
            children = []
            for side in ("down", "up"):
                lo_c = current.lo.copy()
                up_c = current.up.copy()
                if side == "down":
                    up_c[branch_id] = math.floor(val)
                else:
                    lo_c[branch_id] = math.ceil(val)
                if lo_c[branch_id] > up_c[branch_id]:
                    continue
                if node_limit is not None and nodes >= node_limit:
                    truncated = True
                    return
                st, x_c, obj_c = prepared.solve(lo_c, up_c)
                nodes += 1
                if st != "optimal":
                    continue
                if obj_c >= incumbent_obj - abs_gap:
                    continue
                child = _Node(bound=obj_c, seq=seq, lo=lo_c, up=up_c, x=x_c)
                seq += 1
                if _fractional_index(x_c, int_ids, binary_mask) is None:
                    obj_i, x_i = make_incumbent(x_c)
                    if obj_i < incumbent_obj - 1e-15:
                        incumbent_obj, incumbent_x = obj_i, x_i
                    continue
                children.append(child)
            if not children:
                return
            if dive and incumbent_x is None and len(children) >= 1:
                children.sort()
                current = children[0]
                for other in children[1:]:
                    heapq.heappush(heap, other)
                continue
            for child in children:
                heapq.heappush(heap, child)
            return

    expand(root, dive=True)
    while heap:
        if node_limit is not None and nodes >= node_limit:
            if any(nd.bound < incumbent_obj - abs_gap for nd in heap):
                truncated = True
            break
        node = heapq.heappop(heap)
        if node.bound >= incumbent_obj - abs_gap:
            continue
        expand(node, dive=incumbent_x is None)
    if truncated:
        # ran out of budget with work left
        return Solution(
            status="node_limit",
            objective=None
            if incumbent_x is None
            else incumbent_obj + model.objective_constant,
            assignment=incumbent_x,
            nodes_explored=nodes,
        )
    if incumbent_x is None:
        return Solution(status="infeasible", objective=None, assignment=None, nodes_explored=nodes)
    return Solution(
        status="optimal",
        objective=incumbent_obj + model.objective_constant,
        assignment=incumbent_x,
        nodes_explored=nodes,
    )


# ---------------------------------------------------------------------------
# exhaustive enumeration oracle
# ---------------------------------------------------------------------------


def solve_enumerate(model: IPModel, cap: int = 1_000_000) -> Solution:
    """Exhaustively score every integer assignment (oracle path).

    All variables must be integer-kind with finite bounds, and the
    assignment space must not exceed ``cap`` (checked before any work).
    Ties break toward the lexicographically smallest assignment.
    """
    for v in model.variables:
        if v.kind == CONTINUOUS:
            raise ValueError("enumeration requires all-integer models")
        if not (math.isfinite(v.lower) and math.isfinite(v.upper)):
            raise ValueError(f"variable {v.name!r} must have finite bounds")
    lo = np.array([math.ceil(v.lower - 1e-9) for v in model.variables], dtype=np.int64)
    up = np.array([math.floor(v.upper + 1e-9) for v in model.variables], dtype=np.int64)
    if np.any(lo > up):
        return Solution(status="infeasible", objective=None, assignment=None)
    ranges = (up - lo + 1).astype(np.int64)
    total = 1
    for r in ranges:
        total *= int(r)
        if total > cap:
            raise ValueError(
                f"enumeration space exceeds cap ({cap}); refusing to start"
            )

    n = model.num_variables
    weights = np.ones(n, dtype=np.int64)
    for j in range(n - 2, -1, -1):
        weights[j] = weights[j + 1] * ranges[j + 1]

    a, b, senses = model.constraint_matrix()
    c = model.objective_vector()
    best_obj = math.inf
    best_x: np.ndarray | None = None
    chunk = 100_000
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        x = (idx[:, None] // weights[None, :]) % ranges[None, :] + lo[None, :]
        xf = x.astype(float)
        feasible = np.ones(len(idx), dtype=bool)
        if len(senses):
            lhs = xf @ a.T
            for i, sense in enumerate(senses):
                if sense == "<=":
                    feasible &= lhs[:, i] <= b[i] + 1e-9
                elif sense == ">=":
                    feasible &= lhs[:, i] >= b[i] - 1e-9
                else:
                    feasible &= np.abs(lhs[:, i] - b[i]) <= 1e-9
        if not feasible.any():
            continue
        objs = xf @ c
        objs[~feasible] = math.inf
        pos = int(np.argmin(objs))
        if objs[pos] < best_obj:
            best_obj = float(objs[pos])
            best_x = xf[pos].copy()
    if best_x is None:
        return Solution(status="infeasible", objective=None, assignment=None)
    return Solution(
        status="optimal",
        objective=best_obj + model.objective_constant,
        assignment=best_x,
        nodes_explored=total,
    )
