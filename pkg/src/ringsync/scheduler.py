"""Flight schedules: start positions, directions, and section travel times.

Circle mode works with start angles (Lemma-style reflection propagation);
general mode assigns per-section travel times on closed paths and propagates
time offsets so that every neighbor pair reaches its link locations
simultaneously.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .commgraph import (CommGraph, cycle_basis, edge_key, spanning_tree,
                        two_color)
from .errors import (ClosureViolationError, InfeasibleSectionTimesError,
                     NotSynchronizableError)
from .geometry import TWO_PI, norm_angle

CCW = "CCW"
CW = "CW"

# Phase tolerance (fraction of the period) for synchronization checks.
PHASE_TOL = 1e-9


@dataclass
class Schedule:
    mode: str                  # "same-direction" | "opposite-directions" | "general"
    period: float
    starts: list               # per agent: start angle (circle) or arc length (general)
    dirs: list                 # per agent: CCW | CW
    # general mode only: per trajectory, neighbor -> link arrival epoch in [0, T)
    epochs: list | None = None


@dataclass
class SyncReport:
    period: float
    edges: dict = field(default_factory=dict)  # (i,j) -> (synchronized, phase_error_seconds)

    @property
    def all_synchronized(self) -> bool:
        return all(ok for ok, _ in self.edges.values())

    @property
    def max_phase_error(self) -> float:
        return max((err for _, err in self.edges.values()), default=0.0)


def arrival_time(alpha: float, direction: str, phi: float, period: float) -> float:
    """First time an agent starting at alpha reaches angle phi."""
    if direction == CCW:
        delta = norm_angle(phi - alpha)
    else:
        delta = norm_angle(alpha - phi)
    return delta * period / TWO_PI


def schedule_same_direction(g: CommGraph, base: float = 0.0, period: float = 1.0) -> Schedule:
    """All agents CCW; the two color classes start antipodally (base, base+pi)."""
    coloring, witness = two_color(g)
    if coloring is None:
        raise NotSynchronizableError(
            f"graph is not bipartite; odd cycle {witness}", witness=witness)
    starts = [norm_angle(base) if coloring.side(i) == "A" else norm_angle(base + math.pi)
              for i in range(g.n)]
    return Schedule(mode="same-direction", period=period,
                    starts=starts, dirs=[CCW] * g.n)


def schedule_opposite_directions(g: CommGraph, start_node: int = 0,
                                 alpha0: float = 0.0, period: float = 1.0,
                                 tol: float = PHASE_TOL) -> Schedule:
    """BFS propagation of start angles via alpha_a = 2*beta - alpha_w - pi.

    Adjacent agents get opposite directions.  Non-tree edges are checked for
    closure; the reflection identity makes either +-pi branch acceptable, so
    the check is that the verified phase error vanishes.
    """
    coloring, witness = two_color(g)
    if coloring is None:
        raise NotSynchronizableError(
            f"graph is not bipartite; odd cycle {witness}", witness=witness)
    starts = [None] * g.n
    dirs = [None] * g.n
    starts[start_node] = norm_angle(alpha0)
    dirs[start_node] = CCW
    queue = [start_node]
    seen = {start_node}
    order = [start_node] + [i for i in range(g.n) if i != start_node]
    for s in order:  # cover disconnected graphs deterministically
        if s not in seen:
            starts[s] = norm_angle(alpha0)
            dirs[s] = CCW
            seen.add(s)
            queue.append(s)
        while queue:
            w = queue.pop(0)
            for a in g.neighbors(w):
                if a in seen:
                    continue
                seen.add(a)
                starts[a] = norm_angle(2.0 * g.beta(w, a) - starts[w] - math.pi)
                dirs[a] = CW if dirs[w] == CCW else CCW
                queue.append(a)
    sched = Schedule(mode="opposite-directions", period=period, starts=starts, dirs=dirs)
    report = verify_schedule(g, sched, tol=tol)
    bad = [e for e, (ok, _) in report.edges.items() if not ok]
    if bad:
        raise ClosureViolationError(
            f"cycle closure violated on edges {bad}", edge=bad[0])
    return sched


def verify_schedule(g: CommGraph, s: Schedule, tol: float = PHASE_TOL) -> SyncReport:
    """Check every edge: first arrivals at the two link positions coincide mod T."""
    report = SyncReport(period=s.period)
    for (i, j) in g.edge_list():
        if s.mode == "general":
            ti = s.epochs[i][j]
            tj = s.epochs[j][i]
        else:
            ti = arrival_time(s.starts[i], s.dirs[i], g.phi(i, j), s.period)
            tj = arrival_time(s.starts[j], s.dirs[j], g.phi(j, i), s.period)
        diff = math.fmod(abs(ti - tj), s.period)
        err = min(diff, s.period - diff)
        report.edges[(i, j)] = (err <= tol * s.period, err)
    return report


def link_epochs(g: CommGraph, s: Schedule) -> dict:
    """Per edge, the common link arrival epoch in [0, T) of both occupants."""
    out = {}
    for (i, j) in g.edge_list():
        if s.mode == "general":
            e = s.epochs[i][j]
        else:
            e = arrival_time(s.starts[i], s.dirs[i], g.phi(i, j), s.period)
        out[(i, j)] = math.fmod(e, s.period)
    return out


def check_cycle_same_direction(times, period: float, tol: float = PHASE_TOL):
    """Integer z with sum(t_i) = z*T, or None (same-direction cycle condition)."""
    k = len(times)
    total = float(sum(times))
    z = round(total / period)
    if 0 < z < k and abs(total - z * period) <= tol * period * k:
        return z
    return None


def check_cycle_opposite(times, period: float, tol: float = PHASE_TOL):
    """Integer z with t_1 + r_2 + t_3 + ... + r_2k = z*T, or None.

    times are the inside-section times t_i; r_i = T - t_i.
    """
    k = len(times)
    if k % 2 != 0:
        raise ValueError(f"cycle length must be even, got {k}")
    total = 0.0
    for idx, t in enumerate(times):
        total += t if idx % 2 == 0 else period - t
    z = round(total / period)
    if 0 < z < k and abs(total - z * period) <= tol * period * k:
        return z
    return None


# ---------------------------------------------------------------------------
# Section plans (general mode)
# ---------------------------------------------------------------------------

@dataclass
class SectionPlan:
    """Per-trajectory section times between consecutive link locations.

    link_order[i] lists trajectory i's neighbors in travel order; times[i][k]
    is the travel time from the link with link_order[i][k] to the link with
    link_order[i][(k+1) % m].  Single-link trajectories hold one full-loop
    section.  section_lengths mirrors times when geometry is known.
    """
    period: float
    link_order: dict      # traj -> list of neighbor ids
    times: dict           # traj -> list of section times
    section_lengths: dict | None = None

    def time_between(self, traj: int, from_nb: int, to_nb: int) -> float:
        """Travel time on traj from the link with from_nb to the link with to_nb."""
        order = self.link_order[traj]
        times = self.times[traj]
        if from_nb == to_nb:
            return 0.0
        k = order.index(from_nb)
        total = 0.0
        while True:
            total += times[k]
            k = (k + 1) % len(order)
            if order[k] == to_nb:
                return total
            if total > len(order) * self.period:
                raise ValueError(f"neighbor {to_nb} not on trajectory {traj}")


def validate_section_plan(plan: SectionPlan, cycles, tol: float = 1e-12):
    """Check period sums and the opposite-direction cycle equations.

    Returns the list of feasible z values, one per cycle, or raises.
    Tolerances are absolute in units of the period (tol * T).
    """
    T = plan.period
    for traj, times in plan.times.items():
        if any(t <= 0 for t in times):
            raise InfeasibleSectionTimesError(f"non-positive section time on {traj}")
        if abs(sum(times) - T) > tol * T:
            raise InfeasibleSectionTimesError(
                f"section times on {traj} sum to {sum(times)}, expected {T}")
    zs = []
    for cyc in cycles:
        k = len(cyc)
        total = 0.0
        for idx, node in enumerate(cyc):
            prev = cyc[(idx - 1) % k]
            nxt = cyc[(idx + 1) % k]
            total += plan.time_between(node, nxt, prev)
        z = round(total / T)
        if not (0 < z < k) or abs(total - z * T) > tol * T * k:
            raise InfeasibleSectionTimesError(
                f"cycle {cyc} sums to {total / T:.6f} T, not an admissible multiple",
                cycles=[cyc])
        zs.append(z)
    return zs


def _travel_orders(g: CommGraph, dirs):
    """Neighbor visit order on each trajectory under the assigned direction.

    CCW visits link locations by increasing arc length; CW by decreasing.
    """
    order = {}
    for i in range(g.n):
        nbs = g.neighbors(i)
        if not nbs:
            continue
        nbs = sorted(nbs, key=lambda j: (g.phi(i, j), j))
        if dirs[i] == CW:
            nbs = nbs[::-1]
        order[i] = nbs
    return order


def _section_lengths(g: CommGraph, order, dirs):
    lengths = {}
    for i, nbs in order.items():
        li = g.lengths[i]
        m = len(nbs)
        if m == 1:
            lengths[i] = [li]
            continue
        secs = []
        for k in range(m):
            s0 = g.phi(i, nbs[k])
            s1 = g.phi(i, nbs[(k + 1) % m])
            d = math.fmod(s1 - s0, li) if dirs[i] == CCW else math.fmod(s0 - s1, li)
            if d < 0:
                d += li
            if d == 0:
                d = li
            secs.append(d)
        lengths[i] = secs
    return lengths


def assign_section_times(g: CommGraph, cycles=None, period: float = 1.0,
                         min_fraction: float = 0.01) -> SectionPlan:
    """Assign section times satisfying the period and cycle constraints.

    The objective minimizes the maximum relative deviation of section speed
    from the trajectory's mean speed length/T, via bisection on the deviation
    bound with an LP feasibility check per candidate z combination.  Trees get
    constant speed exactly.  min_fraction is the smallest admissible section
    time as a fraction of T.
    """
    coloring, witness = two_color(g)
    if coloring is None:
        raise NotSynchronizableError(
            f"graph is not bipartite; odd cycle {witness}", witness=witness)
    if g.lengths is None:
        raise ValueError("assign_section_times requires trajectory lengths (path mode)")
    dirs = [CCW if coloring.side(i) == "A" else CW for i in range(g.n)]
    order = _travel_orders(g, dirs)
    sec_len = _section_lengths(g, order, dirs)
    if cycles is None:
        cycles = cycle_basis(g)

    nominal = {i: [L * period / g.lengths[i] for L in sec_len[i]] for i in order}
    if not cycles:
        return SectionPlan(period=period, link_order=order, times=nominal,
                           section_lengths=sec_len)

    # Flatten variables: one per (trajectory, section)
    var_index = {}
    for i in order:
        for k in range(len(order[i])):
            var_index[(i, k)] = len(var_index)
    nvars = len(var_index)

    def section_vars(traj, from_nb, to_nb):
        """Variable indices of the sections from one link to another."""
        nbs = order[traj]
        k = nbs.index(from_nb)
        out = []
        while nbs[k] != to_nb:
            out.append(var_index[(traj, k)])
            k = (k + 1) % len(nbs)
        return out

    A_period = np.zeros((len(order), nvars))
    b_period = np.full(len(order), period)
    for row, i in enumerate(order):
        for k in range(len(order[i])):
            A_period[row, var_index[(i, k)]] = 1.0

    cycle_rows = []
    for cyc in cycles:
        row = np.zeros(nvars)
        for idx, node in enumerate(cyc):
            prev = cyc[(idx - 1) % len(cyc)]
            nxt = cyc[(idx + 1) % len(cyc)]
            for vi in section_vars(node, nxt, prev):
                row[vi] += 1.0
        cycle_rows.append(row)

    lo = min_fraction * period
    nom_vec = np.zeros(nvars)
    for (i, k), vi in var_index.items():
        nom_vec[vi] = nominal[i][k]

    def feasible(lam, zs):
        """LP feasibility at speed-deviation bound lam for the z choices."""
        # speed dev <= lam  <=>  nominal/(1+lam) <= tau <= nominal/(1-lam)
        lower = np.maximum(nom_vec / (1.0 + lam), lo)
        upper = nom_vec / (1.0 - lam) if lam < 1.0 else np.full(nvars, period)
        upper = np.minimum(upper, period)
        if np.any(lower > upper):
            return None
        A_eq = np.vstack([A_period] + cycle_rows)
        b_eq = np.concatenate([b_period, [z * period for z in zs]])
        res = linprog(np.zeros(nvars), A_eq=A_eq, b_eq=b_eq,
                      bounds=list(zip(lower, upper)), method="highs")
        return res.x if res.status == 0 else None

    best = None
    z_ranges = [range(1, len(cyc)) for cyc in cycles]
    for zs in itertools.product(*z_ranges):
        if feasible(0.999999, zs) is None:
            continue
        lo_l, hi_l = 0.0, 0.999999
        x_best = feasible(hi_l, zs)
        for _ in range(40):
            mid = 0.5 * (lo_l + hi_l)
            x = feasible(mid, zs)
            if x is not None:
                hi_l, x_best = mid, x
            else:
                lo_l = mid
        if best is None or hi_l < best[0]:
            best = (hi_l, zs, x_best)
    if best is None:
        raise InfeasibleSectionTimesError(
            "no z combination admits positive section times", cycles=cycles)

    _, zs, x = best
    # LP solutions satisfy the equalities only to ~1e-8; project onto the
    # exact equality manifold (minimum-norm correction, well within bounds).
    A_eq = np.vstack([A_period] + cycle_rows)
    b_eq = np.concatenate([b_period, [z * period for z in zs]])
    corr, *_ = np.linalg.lstsq(A_eq, A_eq @ x - b_eq, rcond=None)
    x = x - corr
    times = {i: [float(x[var_index[(i, k)]]) for k in range(len(order[i]))]
             for i in order}
    # Snap each trajectory's sum to exactly T against rounding in the sums
    for i in times:
        scale = period / math.fsum(times[i])
        times[i] = [t * scale for t in times[i]]
    return SectionPlan(period=period, link_order=order, times=times,
                       section_lengths=sec_len)


def schedule_general(g: CommGraph, plan: SectionPlan, start_node: int = 0,
                     s0: float = 0.0, tol: float = 1e-6) -> Schedule:
    """Propagate link arrival epochs over a BFS tree; verify non-tree closure."""
    coloring, witness = two_color(g)
    if coloring is None:
        raise NotSynchronizableError(
            f"graph is not bipartite; odd cycle {witness}", witness=witness)
    dirs = [CCW if coloring.side(i) == "A" else CW for i in range(g.n)]
    T = plan.period
    epochs = [dict() for _ in range(g.n)]

    def fill_from(traj, anchor_nb, anchor_epoch):
        nbs = plan.link_order[traj]
        k = nbs.index(anchor_nb)
        t = anchor_epoch
        epochs[traj][anchor_nb] = math.fmod(anchor_epoch, T)
        for step in range(1, len(nbs)):
            t += plan.times[traj][(k + step - 1) % len(nbs)]
            epochs[traj][nbs[(k + step) % len(nbs)]] = math.fmod(t, T)

    # Anchor the start trajectory: time from s0 to its first link at plan speeds.
    first_nb = plan.link_order[start_node][0]
    t0 = _time_to_first_link(g, plan, start_node, s0, dirs[start_node])
    fill_from(start_node, first_nb, t0)

    tree = spanning_tree(g, root=start_node)
    tree_set = set(tree)
    seen = {start_node}
    queue = [start_node]
    while queue:
        w = queue.pop(0)
        for a in g.neighbors(w):
            if a in seen or edge_key(w, a) not in tree_set:
                continue
            seen.add(a)
            fill_from(a, w, epochs[w][a])
            queue.append(a)

    for (i, j) in g.edge_list():
        if edge_key(i, j) in tree_set:
            continue
        diff = math.fmod(abs(epochs[i][j] - epochs[j][i]), T)
        err = min(diff, T - diff)
        if err > tol * T:
            raise ClosureViolationError(
                f"edge ({i},{j}) closure error {err:.3e}", edge=(i, j))

    starts = [_start_position(g, plan, i, epochs[i], dirs[i]) for i in range(g.n)]
    return Schedule(mode="general", period=T, starts=starts, dirs=dirs,
                    epochs=epochs)


def _time_to_first_link(g, plan, traj, s0, direction):
    """Travel time from arc length s0 to the first link in travel order."""
    li = g.lengths[traj]
    target = g.phi(traj, plan.link_order[traj][0])
    if direction == CCW:
        d = math.fmod(target - s0, li)
    else:
        d = math.fmod(s0 - target, li)
    if d < 0:
        d += li
    # mean speed of the section containing s0 is a fair approximation for the
    # anchor offset; exactness is irrelevant since only relative epochs matter
    return d * plan.period / li


def _start_position(g, plan, traj, traj_epochs, direction):
    """Arc length occupied at t=0, walked back from the first link arrival."""
    if not traj_epochs:
        return 0.0
    nb = plan.link_order[traj][0]
    s_link = g.phi(traj, nb)
    t_arr = traj_epochs[nb]
    # walk back t_arr units of time through the sections preceding the link
    nbs = plan.link_order[traj]
    li = g.lengths[traj]
    if len(nbs) == 1:
        frac = math.fmod(t_arr, plan.period) / plan.period
        delta = frac * li
    else:
        k = nbs.index(nb)
        t = math.fmod(t_arr, plan.period)
        delta = 0.0
        kk = (k - 1) % len(nbs)
        while t > 0:
            tau = plan.times[traj][kk]
            L = plan.section_lengths[traj][kk] if plan.section_lengths else li * tau / plan.period
            if t >= tau:
                delta += L
                t -= tau
            else:
                delta += L * t / tau
                t = 0.0
            kk = (kk - 1) % len(nbs)
    if direction == CCW:
        s = s_link - delta
    else:
        s = s_link + delta
    s = math.fmod(s, li)
    return s + li if s < 0 else s
