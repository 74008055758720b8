"""Blocked clause elimination: blockedness tests, touch propagation, and a
size-limited worklist engine that records blocking literals.

A literal l blocks clause C when C contains both l and -l, or when every
resolvent of C on l against the current formula is a tautology. The engine
restricts which literals it tests and which clauses it re-touches once the
formula crosses the size thresholds below; with ``is_first`` set it behaves
as a full, unrestricted elimination pass.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .cnf import Clause, Formula, formula_from_clauses
from .errors import InternalError, TimeoutExceeded

# Thresholds for the limited engine. Below the size limits (or on the first
# invocation) every literal is tested and every complement occurrence is
# re-touched; above them only rare literals are considered.
DEFAULT_LITERAL_OCC_LIMIT = 2
FULL_SCAN_FORMULA_LIMIT = 300_000
FULL_TOUCH_FORMULA_LIMIT = 800_000

# Maps eliminated clause id -> the blocking literal used at elimination time.
BlockingTrace = dict[int, int]


@dataclass
class BceContext:
    """Knobs for one elimination run."""

    is_first: bool = False
    limit_occ: int = DEFAULT_LITERAL_OCC_LIMIT
    limit_size: int = FULL_SCAN_FORMULA_LIMIT
    touch_full_threshold: int = FULL_TOUCH_FORMULA_LIMIT
    deadline: float | None = None


class TouchList:
    """FIFO worklist of clause ids with O(1) pending-membership.

    An id is never enqueued twice while pending. With a cap set, enqueues
    beyond the cap drop the new entry and bump the drop counter.
    """

    __slots__ = ("_queue", "_pending", "cap", "drops")

    def __init__(self, ids: Iterable[int] = (), cap: int | None = None):
        self._queue: deque[int] = deque()
        self._pending: set[int] = set()
        self.cap = cap
        self.drops = 0
        for cid in ids:
            self.push(cid)

    def push(self, cid: int) -> None:
        if cid in self._pending:
            return
        if self.cap is not None and len(self._queue) >= self.cap:
            self.drops += 1
            return
        self._pending.add(cid)
        self._queue.append(cid)

    def pop(self) -> int:
        cid = self._queue.popleft()
        self._pending.discard(cid)
        return cid

    def __len__(self) -> int:
        return len(self._queue)

    def __bool__(self) -> bool:
        return bool(self._queue)


def resolvent_tautology(c: Clause, d: Clause, l: int) -> bool:
    """True iff the resolvent of c and d on l contains a complementary pair.

    Requires l in c and -l in d.
    """
    if l not in c.lit_set or -l not in d.lit_set:
        raise InternalError(f"cannot resolve on {l}: literal not present")
    nl = -l
    rest = c.lit_set
    for j in d.literals:
        if j != nl and -j in rest:
            return True
    # pairs internal to one side survive into the resolvent
    v = abs(l)
    for tv in c.taut_vars:
        if tv != v:
            return True
    for tv in d.taut_vars:
        if tv != v:
            return True
    return False


def is_blocked(c: Clause, l: int, f: Formula) -> bool:
    """True iff l blocks c w.r.t. the alive clauses of f."""
    cset = c.lit_set
    if -l in cset:
        return True
    v = l if l > 0 else -l
    for tv in c.taut_vars:
        if tv != v:
            # every resolvent inherits this pair
            return True
    nl = -l
    clauses = f.clauses
    for did in f.occ_list(nl):
        d = clauses[did]
        if not d.alive or d is c:
            continue
        for j in d.literals:
            if j != nl and -j in cset:
                break
        else:
            for tv in d.taut_vars:
                if tv != v:
                    break
            else:
                return False
    return True


def touch(c: Clause, f: Formula, ctx: BceContext) -> list[int]:
    """Alive clauses whose blockedness may change after eliminating c.

    Full form: every alive clause containing the negation of a literal of c.
    Above the size threshold (and past the first run) only literals of c
    that themselves occur fewer than twice contribute.
    """
    full = ctx.is_first or f.n_alive < ctx.touch_full_threshold
    out: list[int] = []
    seen: set[int] = set()
    clauses = f.clauses
    for x in c.literals:
        if not full and f.live_count(x) >= 2:
            continue
        for cid in f.occ_list(-x):
            if cid not in seen and clauses[cid].alive:
                seen.add(cid)
                out.append(cid)
    return out


def bce(
    t: TouchList,
    f: Formula,
    blocked_out: set[int],
    ctx: BceContext,
) -> tuple[list[int], BlockingTrace]:
    """Run limited elimination over the worklist, killing blocked clauses.

    Eliminated ids are added to ``blocked_out`` in place and returned, in
    elimination order, together with the blocking-literal trace. Dead
    worklist entries are skipped. For each dequeued clause only literals l
    with few complement occurrences are tested, unless the formula is small
    or this is the first invocation.
    """
    eliminated: list[int] = []
    trace: BlockingTrace = {}
    clauses = f.clauses
    is_first = ctx.is_first
    limit_occ = ctx.limit_occ
    limit_size = ctx.limit_size
    deadline = ctx.deadline
    live = f._live
    while t:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutExceeded("blocked clause elimination ran past the deadline")
        cid = t.pop()
        c = clauses[cid]
        if not c.alive:
            continue
        full_scan = is_first or f.n_alive < limit_size
        for l in c.literals:
            if not full_scan and live.get(-l, 0) >= limit_occ:
                continue
            if is_blocked(c, l, f):
                f.kill(cid)
                blocked_out.add(cid)
                eliminated.append(cid)
                trace[cid] = l
                for tid in touch(c, f, ctx):
                    t.push(tid)
                break
    return eliminated, trace


def solve_by_bce(f: Formula, ids: Iterable[int] | None = None) -> BlockingTrace | None:
    """Full elimination of the sub-formula induced by ids.

    Returns the blocking trace (in elimination order, keyed by the original
    clause ids) when everything is eliminated, else None.
    """
    id_list = sorted(ids) if ids is not None else f.alive_ids()
    sub = f.induced(id_list)
    ctx = BceContext(is_first=True)
    out: set[int] = set()
    _, trace = bce(TouchList(range(len(sub.clauses))), sub, out, ctx)
    if sub.n_alive:
        return None
    return {id_list[k]: lit for k, lit in trace.items()}


def verify_solvable(f: Formula, ids: Iterable[int]) -> bool:
    """True iff full elimination empties the sub-formula induced by ids."""
    return solve_by_bce(f, ids) is not None
