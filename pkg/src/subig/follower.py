"""Follower-side maximization: greedy, exact branch-and-cut, and separation.

The exact solver maximizes theta subject to knapsack rows and lazily added
submodular bounding rows (two per generating set: one anchored at full-set
complements, one at within-set prefixes).  Nodes are explored depth-first so
that, in cutoff mode, an improving feasible solution surfaces quickly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .core import KnapsackSystem, SubmodularOracle
from .lp import LpModel, solve_lp, INFEASIBLE

OPTIMAL = "optimal"
CUTOFF_EXCEEDED = "cutoff_exceeded"
TIMED_OUT = "timed_out"

INT_TOL = 1e-6
CUTOFF_SLACK = 1e-6


class FollowerTimeout(RuntimeError):
    """Raised when a caller needs an exact answer but the time budget ran out."""


@dataclass
class SepResult:
    items: frozenset
    value: float
    bound: float
    status: str


def greedy(
    oracle: SubmodularOracle,
    ground_subset: Iterable[int],
    seed_set: Iterable[int] = (),
    seed_order: Sequence[int] = (),
    knapsacks: KnapsackSystem | None = None,
) -> Tuple[frozenset, Tuple[int, ...]]:
    """Repeatedly add the feasible item with the largest value until nothing
    fits; the returned order extends the seed order by appended picks."""
    if knapsacks is None:
        raise ValueError("knapsack system required")
    seed = set(seed_set)
    order = list(seed_order) if seed_order else sorted(seed)
    if set(order) != seed or len(order) != len(seed):
        raise ValueError("seed order must be a permutation of the seed set")
    if not knapsacks.fits(seed):
        raise ValueError("seed set violates a knapsack constraint")
    ground = sorted(set(ground_subset) | seed)
    ev = oracle.scratch()
    ev.reset(seed)
    weight = knapsacks.weight(seed)
    caps = np.asarray(knapsacks.caps)
    current = set(seed)
    while True:
        best = None
        for i in ground:
            if i in current:
                continue
            if not np.all(weight + knapsacks.item_cost(i) <= caps + 1e-9):
                continue
            g = ev.gain(i)
            if best is None or g > best[0] + 1e-12:
                best = (g, i)
        if best is None:
            break
        _, pick = best
        ev.add(pick)
        current.add(pick)
        weight += knapsacks.item_cost(pick)
        order.append(pick)
    return frozenset(current), tuple(order)


def bounding_rows(
    oracle: SubmodularOracle,
    available: Sequence[int],
    s_hat: Iterable[int],
    rho_full: np.ndarray | None = None,
    scratch=None,
) -> List[Tuple[Dict[int, float], float]]:
    """The two submodular upper-bound rows anchored at s_hat, each returned as
    (coefs, rhs) meaning  theta <= rhs + sum_i coefs[i] * y_i.

    Row one charges leavers at their full-ground complement gains (computed
    once per instance and valid for any availability); row two uses empty-set
    gains for entrants and within-set complement gains for leavers.
    """
    if rho_full is None:
        rho_full = oracle.rho_full_complement()
    rho0 = oracle.rho_empty()
    ev = scratch if scratch is not None else oracle.scratch()
    sset = set(s_hat)
    ev.reset(sset)
    z_s = float(ev.value)
    gains_out = {i: float(ev.gain(i)) for i in available if i not in sset}
    gains_in = {}
    for i in sorted(sset):
        ev.remove(i)
        gains_in[i] = float(ev.gain(i))
        ev.add(i)
    row1 = dict(gains_out)
    rhs1 = z_s
    for i in sset:
        row1[i] = float(rho_full[i])
        rhs1 -= float(rho_full[i])
    row2 = {i: float(rho0[i]) for i in gains_out}
    rhs2 = z_s
    for i in sset:
        row2[i] = gains_in[i]
        rhs2 -= gains_in[i]
    return [(row1, rhs1), (row2, rhs2)]


def solve_sep(
    oracle: SubmodularOracle,
    available: Iterable[int],
    knapsacks: KnapsackSystem,
    cutoff: float | None = None,
    time_budget: float | None = None,
    rho_full: np.ndarray | None = None,
) -> SepResult:
    """Exact follower optimum over the available items via branch-and-cut.

    With a cutoff, returns as soon as some feasible solution beats it
    (status ``cutoff_exceeded``); the value is then a lower bound on the true
    optimum, which is all the enhanced separation needs.
    """
    items = sorted(set(available))
    for i in items:
        oracle.check_item(i)
    if not items:
        return SepResult(frozenset(), 0.0, 0.0, OPTIMAL)
    t0 = time.monotonic()
    if rho_full is None:
        rho_full = oracle.rho_full_complement()
    rho0 = oracle.rho_empty()

    ub_theta = oracle.value(items)  # monotonicity: no subset beats the full set
    inc_set, _ = greedy(oracle, items, knapsacks=knapsacks)
    inc_val = oracle.value(inc_set)
    if cutoff is not None and inc_val > cutoff + CUTOFF_SLACK:
        return SepResult(inc_set, inc_val, ub_theta, CUTOFF_EXCEEDED)

    model = LpModel("max")
    ycol = {}
    for i in items:
        ycol[i] = model.add_var(0.0, 1.0, obj=0.0, name=f"y{i}")
    theta = model.add_var(0.0, ub_theta, obj=1.0, name="theta")
    caps = knapsacks.caps
    for ell in range(knapsacks.L):
        coefs = {ycol[i]: knapsacks.costs[ell][i] for i in items if knapsacks.costs[ell][i] != 0.0}
        if coefs:
            model.add_row(coefs, caps[ell])

    ev = oracle.scratch()

    def add_rows_for(s_hat: Sequence[int], theta_star: float, y_star: Dict[int, float]) -> int:
        """Bounding rows anchored at s_hat; returns how many were new and
        violated at (theta*, y*)."""
        added = 0
        for coefs, rhs in bounding_rows(oracle, items, s_hat, rho_full=rho_full, scratch=ev):
            lhs = theta_star - sum(c * y_star[ycol[i]] for i, c in coefs.items())
            if lhs > rhs + 1e-7:
                row = {ycol[i]: -c for i, c in coefs.items()}
                row[theta] = 1.0
                before = model.n_rows
                model.add_row(row, rhs)
                if model.n_rows > before:
                    added += 1
        return added

    stack: List[Dict[int, int]] = [{}]
    while stack:
        if time_budget is not None and time.monotonic() - t0 > time_budget:
            return SepResult(inc_set, inc_val, ub_theta, TIMED_OUT)
        fixings = stack.pop()
        for i, v in fixings.items():
            model.fix_var(ycol[i], float(v))
        try:
            node_done = False
            while not node_done:
                res = solve_lp(model)
                if res.status == INFEASIBLE:
                    node_done = True
                    break
                bound = res.objective
                if bound <= inc_val + 1e-9:
                    node_done = True
                    break
                if cutoff is not None and inc_val > cutoff + CUTOFF_SLACK:
                    node_done = True
                    break
                yv = {ycol[i]: res.x[ycol[i]] for i in items}
                theta_star = res.x[theta]
                frac = [i for i in items if INT_TOL < yv[ycol[i]] < 1.0 - INT_TOL]
                if not frac:
                    s_hat = [i for i in items if yv[ycol[i]] > 0.5]
                    ev.reset(s_hat)
                    z_s = ev.value
                    if theta_star > z_s + INT_TOL:
                        if add_rows_for(s_hat, theta_star, yv) == 0:
                            # numerically stuck: accept the candidate value
                            node_done = True
                        if not node_done:
                            continue
                        # fall through to incumbent update below
                    if z_s > inc_val + 1e-12:
                        inc_val = z_s
                        inc_set = frozenset(s_hat)
                        if cutoff is not None and inc_val > cutoff + CUTOFF_SLACK:
                            return SepResult(inc_set, inc_val, ub_theta, CUTOFF_EXCEEDED)
                    node_done = True
                else:
                    # heuristic generating set: prefix by decreasing y*, stop
                    # once a knapsack row first breaks (prefix kept as-is)
                    order = sorted(items, key=lambda i: (-yv[ycol[i]], i))
                    prefix: List[int] = []
                    weight = np.zeros(knapsacks.L)
                    for i in order:
                        prefix.append(i)
                        weight += knapsacks.item_cost(i)
                        if not knapsacks.fits_weight(weight):
                            break
                    if add_rows_for(prefix, theta_star, yv) > 0:
                        continue
                    # branch on the most fractional variable
                    pick = min(frac, key=lambda i: (abs(yv[ycol[i]] - 0.5), i))
                    zero = dict(fixings)
                    zero[pick] = 0
                    one = dict(fixings)
                    one[pick] = 1
                    stack.append(zero)
                    stack.append(one)  # explore inclusion first
                    node_done = True
        finally:
            for i in fixings:
                model.unfix_var(ycol[i])
    return SepResult(inc_set, inc_val, inc_val, OPTIMAL)


def phi(
    oracle: SubmodularOracle,
    x: Sequence[float],
    knapsacks: KnapsackSystem,
    time_budget: float | None = None,
    rho_full: np.ndarray | None = None,
) -> float:
    """Follower value under interdiction x (binary): exact optimum over the
    uninterdicted items."""
    avail = []
    for i in range(oracle.n):
        xi = x[i]
        if not (abs(xi) <= INT_TOL or abs(xi - 1.0) <= INT_TOL):
            raise ValueError("interdiction vector must be binary")
        if xi <= INT_TOL:
            avail.append(i)
    res = solve_sep(oracle, avail, knapsacks, time_budget=time_budget, rho_full=rho_full)
    if res.status == TIMED_OUT:
        raise FollowerTimeout("follower subproblem exceeded its time budget")
    return res.value


def enhanced_integer_separation(
    oracle: SubmodularOracle,
    w_star: float,
    x_star: Sequence[float],
    knapsacks: KnapsackSystem,
    time_budget: float | None = None,
    rho_full: np.ndarray | None = None,
) -> frozenset:
    """Greedy first; if its cut is already violated at (w*, x*) return that
    set, otherwise fall back to the exact solver run in cutoff mode.  An empty
    result certifies that no violated cut exists at (w*, x*)."""
    avail = [i for i in range(oracle.n) if x_star[i] <= INT_TOL]
    s_hat, _ = greedy(oracle, avail, knapsacks=knapsacks)
    if oracle.value(s_hat) > w_star + CUTOFF_SLACK:
        return frozenset(s_hat)
    res = solve_sep(
        oracle, avail, knapsacks, cutoff=w_star, time_budget=time_budget, rho_full=rho_full
    )
    if res.status == TIMED_OUT:
        raise FollowerTimeout("follower subproblem exceeded its time budget")
    if res.value > w_star + CUTOFF_SLACK:
        return res.items
    return frozenset()
