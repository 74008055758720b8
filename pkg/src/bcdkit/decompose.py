"""Decomposition algorithms producing a left/right split of a formula.

Every decomposer consumes (kills) the alive clauses of its input and returns
a Decomposition whose left and right id sets partition them. Callers that
need the formula afterwards must pass a clone.

The two occurrence-ordered pure variants scan a sliding window of variable
indices; occurrence counts and clause-size sums live in numpy arrays so a
scan is a handful of vectorized slice operations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .bce import BceContext, BlockingTrace, TouchList, bce, touch
from .cnf import Clause, Formula
from .config import Config
from .errors import InternalError, TimeoutExceeded

_HUGE = np.iinfo(np.int64).max // 4


@dataclass
class Decomposition:
    """A split of a formula's clauses into two id sets."""

    left_ids: set[int]
    right_ids: set[int]
    algorithm: str
    total: int
    phase_times: dict[str, float] = field(default_factory=dict)
    trace: BlockingTrace | None = None
    meta: dict = field(default_factory=dict)
    verified: bool | None = None

    @property
    def fraction(self) -> Fraction:
        if self.total == 0:
            return Fraction(1)
        return Fraction(len(self.left_ids), self.total)

    @property
    def percent(self) -> float:
        return float(self.fraction) * 100.0

    def ordered(self) -> "Decomposition":
        """Same split with the larger side on the left (trace dropped on swap)."""
        if len(self.left_ids) >= len(self.right_ids):
            return self
        return Decomposition(
            left_ids=self.right_ids,
            right_ids=self.left_ids,
            algorithm=self.algorithm,
            total=self.total,
            phase_times=self.phase_times,
            trace=None,
            meta=self.meta,
            verified=self.verified,
        )


@dataclass
class CandidateSet:
    """Clauses whose score reaches the p-th highest value."""

    ids: set[int]
    alpha: int
    p: int


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise TimeoutExceeded("decomposition ran past the deadline")


def _eliminate_variable(
    f: Formula,
    v: int,
    left: set[int],
    right: set[int],
    on_kill: Callable[[Clause], None] | None = None,
) -> None:
    """Move the larger occurrence side of v into left, the rest into right.

    Ties go to the positive side. A clause containing both polarities is
    claimed by the larger side only.
    """
    pos = f.occ_alive(v)
    neg = f.occ_alive(-v)
    if len(pos) >= len(neg):
        big, small = pos, neg
    else:
        big, small = neg, pos
    big_set = set(big)
    left.update(big)
    killed = big
    for cid in small:
        if cid not in big_set:
            right.add(cid)
            killed.append(cid)
    clauses = f.clauses
    for cid in killed:
        f.kill(cid)
        if on_kill is not None:
            on_kill(clauses[cid])


def _sweep_leftovers(f: Formula, right: set[int]) -> None:
    # only variable-free (empty) clauses can remain; they are never blocked
    for cid in f.alive_ids():
        f.kill(cid)
        right.add(cid)


def pure_decompose(f: Formula, deadline: float | None = None) -> Decomposition:
    """Per-variable split in ascending index order, larger side left."""
    total = f.n_alive
    start = time.perf_counter()
    left: set[int] = set()
    right: set[int] = set()
    for v in range(1, f.n_vars + 1):
        if f.n_alive == 0:
            break
        _check_deadline(deadline)
        if f.live_count(v) or f.live_count(-v):
            _eliminate_variable(f, v, left, right)
    _sweep_leftovers(f, right)
    return Decomposition(
        left, right, "pure", total,
        phase_times={"pure": time.perf_counter() - start},
    )


class _VarCounts:
    """Per-variable occurrence counters kept in numpy arrays for window scans."""

    def __init__(self, f: Formula, with_sizes: bool):
        n = f.n_vars
        self.pos = np.zeros(n + 1, dtype=np.int64)
        self.neg = np.zeros(n + 1, dtype=np.int64)
        self.szp = np.zeros(n + 1, dtype=np.int64) if with_sizes else None
        self.szn = np.zeros(n + 1, dtype=np.int64) if with_sizes else None
        for c in f.clauses:
            if not c.alive:
                continue
            clen = len(c.literals)
            for l in c.literals:
                if l > 0:
                    self.pos[l] += 1
                    if with_sizes:
                        self.szp[l] += clen
                else:
                    self.neg[-l] += 1
                    if with_sizes:
                        self.szn[-l] += clen

    def on_kill(self, c: Clause) -> None:
        clen = len(c.literals)
        pos, neg, szp, szn = self.pos, self.neg, self.szp, self.szn
        for l in c.literals:
            if l > 0:
                pos[l] -= 1
                if szp is not None:
                    szp[l] -= clen
            else:
                neg[-l] -= 1
                if szn is not None:
                    szn[-l] -= clen


def _scan_lowest_occurrence(vc: _VarCounts, lo: int, hi: int) -> tuple[int, int] | None:
    """Literal with the fewest occurrences among variables in [lo, hi].

    Ties resolve by smallest total size of the clauses containing the
    literal, then lowest variable index, then positive polarity. Returns
    (literal, count) or None when the range holds no occupied variable.
    """
    p = vc.pos[lo : hi + 1]
    q = vc.neg[lo : hi + 1]
    act = (p > 0) | (q > 0)
    if not act.any():
        return None
    key = np.where(act, np.minimum(p, q), _HUGE)
    m = int(key.min())
    sp = np.where(act & (p == m), vc.szp[lo : hi + 1], _HUGE)
    sn = np.where(act & (q == m), vc.szn[lo : hi + 1], _HUGE)
    min_sp = int(sp.min())
    min_sn = int(sn.min())
    best = min(min_sp, min_sn)
    ip = int(np.argmax(sp == best)) if min_sp == best else None
    iq = int(np.argmax(sn == best)) if min_sn == best else None
    if ip is not None and (iq is None or ip <= iq):
        return lo + ip, m
    return -(lo + iq), m


def _scan_highest_occurrence(vc: _VarCounts, lo: int, hi: int) -> tuple[int, int] | None:
    """Variable with the highest single-polarity occurrence count in [lo, hi].

    Ties resolve by smallest difference between the two polarity counts,
    then lowest variable index. Returns (variable, count) or None.
    """
    p = vc.pos[lo : hi + 1]
    q = vc.neg[lo : hi + 1]
    key = np.maximum(p, q)
    m = int(key.max())
    if m <= 0:
        return None
    diff = np.where(key == m, np.abs(p - q), _HUGE)
    return lo + int(np.argmin(diff)), m


def min_pure_decompose(
    f: Formula,
    cfg: Config | None = None,
    deadline: float | None = None,
    selection_log: list | None = None,
) -> Decomposition:
    """Pure split eliminating lowest-occurrence literals first.

    Every fifth step falls back to plain ascending variable order. The
    occurrence minimum is taken over a window of gamma variable indices
    anchored at the previous selection.
    """
    cfg = cfg or Config(algo="minpure")
    total = f.n_alive
    start = time.perf_counter()
    n = f.n_vars
    gamma = cfg.min_window(n)
    vc = _VarCounts(f, with_sizes=True)
    left: set[int] = set()
    right: set[int] = set()
    k = 0
    s = 1
    ptr = 1
    while f.n_alive > 0:
        _check_deadline(deadline)
        if k % 5 == 0:
            pos, neg = vc.pos, vc.neg
            while ptr <= n and pos[ptr] == 0 and neg[ptr] == 0:
                ptr += 1
            if ptr > n:
                break
            v = ptr
            if selection_log is not None:
                selection_log.append((k, "forced", v))
        else:
            sel = _scan_lowest_occurrence(vc, s, min(n, s + gamma))
            if sel is None:
                sel = _scan_lowest_occurrence(vc, 1, n)
            if sel is None:
                break
            u, m = sel
            v = abs(u)
            if selection_log is not None:
                selection_log.append((k, "window", u, m))
        _eliminate_variable(f, v, left, right, vc.on_kill)
        s = v
        k += 1
    _sweep_leftovers(f, right)
    return Decomposition(
        left, right, "minpure", total,
        phase_times={"minpure": time.perf_counter() - start},
    )


def max_pure_decompose(
    f: Formula,
    cfg: Config | None = None,
    deadline: float | None = None,
    selection_log: list | None = None,
) -> Decomposition:
    """Pure split eliminating highest-occurrence literals first."""
    cfg = cfg or Config(algo="maxpure")
    total = f.n_alive
    start = time.perf_counter()
    n = f.n_vars
    gamma = cfg.max_window(n)
    vc = _VarCounts(f, with_sizes=False)
    left: set[int] = set()
    right: set[int] = set()
    s = 1
    while f.n_alive > 0:
        _check_deadline(deadline)
        sel = _scan_highest_occurrence(vc, s, min(n, s + gamma))
        if sel is None:
            sel = _scan_highest_occurrence(vc, 1, n)
        if sel is None:
            break
        v, m = sel
        if selection_log is not None:
            selection_log.append((v, m))
        _eliminate_variable(f, v, left, right, vc.on_kill)
        s = v
    _sweep_leftovers(f, right)
    return Decomposition(
        left, right, "maxpure", total,
        phase_times={"maxpure": time.perf_counter() - start},
    )


# -- interference scoring ----------------------------------------------------


def _min_live_occurrence(f: Formula) -> int | None:
    m = None
    for count in f._live.values():
        if count > 0 and (m is None or count < m):
            m = count
    return m


def compute_scores(f: Formula, variant: str = "complement") -> None:
    """Refresh Clause.score for every alive clause.

    A clause is charged once for each complementary pair it forms with a
    minimum-occurrence literal: with m the lowest live occurrence count over
    all literals, score[e] = sum over k in e with live_count(k) == m of
    live_count(-k). The "literal" variant charges same-polarity
    co-occurrence with minimum-occurrence literals instead.
    """
    for c in f.clauses:
        if c.alive:
            c.score = 0
    m = _min_live_occurrence(f)
    if m is None:
        return
    clauses = f.clauses
    for g, count in list(f._live.items()):
        if count != m:
            continue
        if variant == "complement":
            w = f.live_count(-g)
            if w == 0:
                continue
        else:
            w = m
        for cid in f.occ_list(g):
            if clauses[cid].alive:
                clauses[cid].score += w


def _select_ids(
    scores: np.ndarray, alive_ids: np.ndarray, p: int
) -> tuple[np.ndarray, int]:
    """Ids of alive clauses scoring at least the p-th highest value.

    Expected-linear selection (introselect); ids come back ascending.
    """
    if p < 1:
        raise InternalError("candidate count must be at least 1")
    count = len(alive_ids)
    vals = scores[alive_ids]
    k = min(p, count)
    alpha = int(np.partition(vals, count - k)[count - k])
    mask = vals >= alpha
    if count >= p:
        above = int((vals > alpha).sum())
        at_least = int(mask.sum())
        if not (above < p <= at_least):
            raise InternalError(
                f"threshold invariant broken: {above} above, {at_least} at or above, p={p}"
            )
    return alive_ids[mask], alpha


def select_candidates(f: Formula, p: int) -> CandidateSet:
    """Alive clauses whose score reaches the p-th highest score.

    With fewer than p alive clauses the threshold degrades to the minimum
    score, i.e. every alive clause qualifies.
    """
    alive_ids = np.array(f.alive_ids(), dtype=np.int64)
    if len(alive_ids) == 0:
        return CandidateSet(set(), 0, p)
    scores = np.zeros(len(f.clauses), dtype=np.int64)
    for c in f.clauses:
        if c.alive:
            scores[c.id] = c.score
    ids, alpha = _select_ids(scores, alive_ids, p)
    return CandidateSet(set(int(i) for i in ids), alpha, p)


def _literal_index(l: int) -> int:
    return 2 * l if l > 0 else -2 * l + 1


def less_interfere_decompose(
    f: Formula,
    cfg: Config | None = None,
    deadline: float | None = None,
) -> Decomposition:
    """Clause-ordered split: keep eliminating blocked clauses, and when stuck
    move one highly-interfering candidate to the right side.

    Candidates are rebuilt in batches of p = max(18, |F| / theta) whenever
    the previous batch is exhausted; scores stay stale in between.
    """
    cfg = cfg or Config(algo="lessinterfere")
    total = f.n_alive
    start = time.perf_counter()
    left: set[int] = set()
    right: set[int] = set()
    trace: BlockingTrace = {}
    ctx = BceContext(is_first=True, deadline=deadline)
    tl = TouchList(f.alive_ids(), cap=cfg.touch_cap)
    _, tr = bce(tl, f, left, ctx)
    trace.update(tr)
    drops = tl.drops
    ctx.is_first = False

    n_slots = len(f.clauses)
    lc = np.zeros(2 * (f.n_vars + 1) + 2, dtype=np.int64)
    alive_mask = np.zeros(n_slots, dtype=bool)
    scores = np.zeros(n_slots, dtype=np.int64)
    for c in f.clauses:
        if c.alive:
            alive_mask[c.id] = True
            for l in c.literals:
                lc[_literal_index(l)] += 1

    clauses = f.clauses

    def note_killed(cids: Iterable[int]) -> None:
        for cid in cids:
            alive_mask[cid] = False
            for l in clauses[cid].literals:
                lc[_literal_index(l)] -= 1

    batch: list[int] = []
    ptr = 0
    rebuilds = 0
    while f.n_alive > 0:
        _check_deadline(deadline)
        cid = None
        while ptr < len(batch):
            x = batch[ptr]
            ptr += 1
            if clauses[x].alive:
                cid = x
                break
        if cid is None:
            rebuilds += 1
            p = cfg.batch_size(f.n_alive)
            scores[alive_mask] = 0
            occupied = lc > 0
            if occupied.any():
                m = int(lc[occupied].min())
                minimal = np.nonzero(lc == m)[0]
                if cfg.score_variant == "complement":
                    for gi in minimal:
                        g = (gi >> 1) if gi % 2 == 0 else -(gi >> 1)
                        w = int(lc[_literal_index(-g)])
                        if w == 0:
                            continue
                        for e in f.occ_list(g):
                            if clauses[e].alive:
                                scores[e] += w
                else:
                    for gi in minimal:
                        g = (gi >> 1) if gi % 2 == 0 else -(gi >> 1)
                        for e in f.occ_list(g):
                            if clauses[e].alive:
                                scores[e] += m
            alive_ids = np.nonzero(alive_mask)[0]
            ids, _alpha = _select_ids(scores, alive_ids, p)
            batch = [int(i) for i in ids]
            ptr = 0
            continue
        f.kill(cid)
        right.add(cid)
        note_killed((cid,))
        tl = TouchList(touch(clauses[cid], f, ctx), cap=cfg.touch_cap)
        elim, tr = bce(tl, f, left, ctx)
        trace.update(tr)
        drops += tl.drops
        note_killed(elim)
    return Decomposition(
        left, right, "lessinterfere", total,
        phase_times={"lessinterfere": time.perf_counter() - start},
        trace=trace,
        meta={"touch_drops": drops, "score_rebuilds": rebuilds},
    )
