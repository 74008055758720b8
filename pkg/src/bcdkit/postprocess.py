"""Quality-raising post-processors and the combined pipeline.

rset_guided_decompose re-derives a split from scratch using an existing
right set as the only source of forced moves, so its right side can only
shrink. move_blocked_clause then pulls right-side clauses whose addition
keeps the left side fully eliminable. mix_decompose chains the component
decomposers with both post-processors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .bce import BceContext, BlockingTrace, TouchList, bce, solve_by_bce, touch, verify_solvable
from .cnf import Clause, Formula
from .config import (
    Config,
    INTERFERE_MAX_CLAUSES,
    INTERFERE_MAX_VARS,
    SKIP_FINAL_MOVE_CLAUSES,
)
from .decompose import (
    Decomposition,
    _check_deadline,
    less_interfere_decompose,
    max_pure_decompose,
    min_pure_decompose,
    pure_decompose,
)
from .errors import InputError, PostconditionViolation


def rset_guided_decompose(
    f: Formula,
    right_ids: set[int],
    cfg: Config | None = None,
    *,
    strict: bool = True,
    deadline: float | None = None,
) -> Decomposition:
    """Re-split f, forcing moves only from the supplied right set.

    Eliminates blocked clauses; when stuck, the lowest-id alive member of
    right_ids is moved right and elimination resumes. The new right side is
    a subset of right_ids, so the left side can only grow. Ids in right_ids
    that are unknown or already dead are skipped.

    With strict=True a stall (alive clauses left but no usable right id)
    raises PostconditionViolation: it cannot happen when right_ids came from
    a split whose right side is fully eliminable. With strict=False a stall
    triggers one unrestricted elimination sweep and any remaining clauses
    are appended to the right side (degraded but total).
    """
    cfg = cfg or Config()
    total = f.n_alive
    start = time.perf_counter()
    left: set[int] = set()
    new_right: set[int] = set()
    trace: BlockingTrace = {}
    ctx = BceContext(is_first=True, deadline=deadline)
    tl = TouchList(f.alive_ids(), cap=cfg.touch_cap)
    _, tr = bce(tl, f, left, ctx)
    trace.update(tr)
    drops = tl.drops
    ctx.is_first = False

    clauses = f.clauses
    n = len(clauses)
    guidance = sorted(right_ids)
    ptr = 0
    while f.n_alive > 0:
        _check_deadline(deadline)
        cid = None
        while ptr < len(guidance):
            x = guidance[ptr]
            ptr += 1
            if 0 <= x < n and clauses[x].alive:
                cid = x
                break
        if cid is None:
            if strict:
                raise PostconditionViolation(
                    f"{f.n_alive} clauses alive but the guiding right set is exhausted"
                )
            sweep = BceContext(is_first=True, deadline=deadline)
            _, tr = bce(TouchList(f.alive_ids()), f, left, sweep)
            trace.update(tr)
            for x in f.alive_ids():
                f.kill(x)
                new_right.add(x)
            break
        f.kill(cid)
        new_right.add(cid)
        tl = TouchList(touch(clauses[cid], f, ctx), cap=cfg.touch_cap)
        _, tr = bce(tl, f, left, ctx)
        trace.update(tr)
        drops += tl.drops
    return Decomposition(
        left, new_right, "rsetguided", total,
        phase_times={"rsetguided": time.perf_counter() - start},
        trace=trace,
        meta={"touch_drops": drops},
    )


# -- incremental blocked-move state -----------------------------------------


class _EliminationState:
    """A witness elimination order for the current left set.

    Entries are (order_key, clause, blocking literal); sorting by key yields
    an order in which each clause is blocked on its literal w.r.t. the
    clauses at and after it. Only "vulnerable" entries, whose blockedness a
    newcomer could break, are indexed by blocking literal.
    """

    def __init__(self, f: Formula, trace: BlockingTrace):
        self.f = f
        self.entries: list[tuple[int, Clause, int]] = []
        self.by_lit: dict[int, list[tuple[int, Clause, int]]] = {}
        self.occ: dict[int, list[Clause]] = {}
        self._front = 0
        self._back = 0
        for cid, lit in trace.items():
            self._back += 1
            self._add_entry((self._back, f.clauses[cid], lit))

    def _add_entry(self, entry: tuple[int, Clause, int]) -> None:
        self.entries.append(entry)
        _key, c, lit = entry
        for l in c.literals:
            self.occ.setdefault(l, []).append(c)
        if self._vulnerable(c, lit):
            self.by_lit.setdefault(lit, []).append(entry)

    @staticmethod
    def _vulnerable(c: Clause, lit: int) -> bool:
        if -lit in c.lit_set:
            return False  # tautological in the blocking variable, always blocked
        v = abs(lit)
        return all(tv == v for tv in c.taut_vars)

    @staticmethod
    def _pair_tautology(e: Clause, c: Clause, le: int) -> bool:
        # resolvent of e (containing le) with c (containing -le); e is known
        # not to be tautological outside var(le)
        nle = -le
        eset = e.lit_set
        for j in c.literals:
            if j != nle and -j in eset:
                return True
        v = abs(le)
        for tv in c.taut_vars:
            if tv != v:
                return True
        return False

    def _blocked_against_all(self, c: Clause) -> int | None:
        """Blocking literal of c w.r.t. every current entry plus c, or None."""
        cset = c.lit_set
        for l in c.literals:
            if -l in cset:
                return l
            v = abs(l)
            if any(tv != v for tv in c.taut_vars):
                return l
            ok = True
            for d in self.occ.get(-l, ()):
                for j in d.literals:
                    if j != -l and -j in cset:
                        break
                else:
                    for tv in d.taut_vars:
                        if tv != v:
                            break
                    else:
                        ok = False
                        break
            if ok:
                return l
        return None

    def try_admit(self, c: Clause) -> bool:
        """Admit c if the left set stays fully eliminable; True on success."""
        if not c.literals:
            return False
        conflict_key = None
        for g in c.literals:
            for entry in self.by_lit.get(-g, ()):
                key, e, le = entry
                if not self._pair_tautology(e, c, le):
                    if conflict_key is None or key < conflict_key:
                        conflict_key = key
        if conflict_key is None:
            # no recorded elimination is disturbed: c goes last, where it is
            # alone and any of its literals blocks it vacuously
            self._back += 1
            self._add_entry((self._back, c, c.literals[0]))
            return True
        lit = self._blocked_against_all(c)
        if lit is not None:
            self._front -= 1
            self._add_entry((self._front, c, lit))
            return True
        # exact fallback: re-solve the disturbed suffix plus c from scratch
        suffix = [e for key, e, _lit in self.entries if key >= conflict_key]
        ids = [e.id for e in suffix] + [c.id]
        tr = solve_by_bce(self.f, ids)
        if tr is None:
            return False
        prefix = sorted(
            (entry for entry in self.entries if entry[0] < conflict_key),
            key=lambda entry: entry[0],
        )
        self.entries = []
        self.by_lit = {}
        self.occ = {}
        self._front = 0
        self._back = 0
        for entry in prefix:
            self._back += 1
            self._add_entry((self._back, entry[1], entry[2]))
        for cid, l in tr.items():
            self._back += 1
            self._add_entry((self._back, self.f.clauses[cid], l))
        return True

    def trace(self) -> BlockingTrace:
        return {
            c.id: lit
            for _key, c, lit in sorted(self.entries, key=lambda entry: entry[0])
        }


def move_blocked_clause(
    l_ids: set[int],
    r_ids: set[int],
    f: Formula,
    trace: BlockingTrace | None = None,
    deadline: float | None = None,
) -> tuple[set[int], set[int], BlockingTrace]:
    """Move right-side clauses whose addition keeps the left side eliminable.

    Candidates are tried in ascending id order; each move is equivalent to
    the full test "is the sub-formula left + candidate fully eliminable",
    implemented incrementally against a maintained elimination order.
    Returns the grown left set, the shrunk right set, and the witness trace
    of the final left set.
    """
    if trace is None:
        trace = solve_by_bce(f, l_ids)
        if trace is None:
            raise InputError("left set is not fully eliminable")
    elif any(cid not in trace for cid in l_ids):
        raise InputError("supplied trace does not cover the left set")
    if l_ids & r_ids:
        raise InputError("left and right sets overlap")
    # keep the trace's own ordering: it is the elimination-order witness
    state = _EliminationState(f, {cid: lit for cid, lit in trace.items() if cid in l_ids})
    left = set(l_ids)
    right = set(r_ids)
    for cid in sorted(r_ids):
        _check_deadline(deadline)
        if state.try_admit(f.clauses[cid]):
            right.discard(cid)
            left.add(cid)
    return left, right, state.trace()


def move_blockable_clause(
    l_ids: set[int],
    r_ids: set[int],
    f: Formula,
    trace: BlockingTrace | None,
) -> tuple[set[int], set[int]]:
    """Move right-side clauses sharing no literal with the blocking literals of the left set.

    Such clauses keep the left side satisfiable but usually break its full
    eliminability, so this step is opt-in. The trace is left unchanged:
    moved clauses carry no blocking literal. Empty clauses never move.
    """
    if trace is None:
        raise InputError("a blocking-literal trace for the left set is required")
    if any(cid not in trace for cid in l_ids):
        raise InputError("supplied trace does not cover the left set")
    blockers = {trace[cid] for cid in l_ids}
    left = set(l_ids)
    right = set(r_ids)
    for cid in sorted(r_ids):
        c = f.clauses[cid]
        if c.literals and not (c.lit_set & blockers):
            right.discard(cid)
            left.add(cid)
    return left, right


# -- combined pipeline -------------------------------------------------------


@dataclass
class StageSnapshot:
    label: str
    left: int
    right: int
    elapsed_s: float

    @property
    def fraction(self) -> Fraction:
        total = self.left + self.right
        return Fraction(self.left, total) if total else Fraction(1)

    @property
    def percent(self) -> float:
        return float(self.fraction) * 100.0


@dataclass
class PipelineReport:
    stages: list[StageSnapshot]
    final: Decomposition
    symmetric: bool
    blockable_moved: int = 0

    def to_dict(self) -> dict:
        return {
            "stages": [
                {
                    "label": s.label,
                    "left": s.left,
                    "right": s.right,
                    "fraction": f"{s.fraction.numerator}/{s.fraction.denominator}",
                    "percent": round(s.percent, 4),
                }
                for s in self.stages
            ],
            "left": len(self.final.left_ids),
            "right": len(self.final.right_ids),
            "fraction": f"{self.final.fraction.numerator}/{self.final.fraction.denominator}",
            "percent": round(self.final.percent, 4),
            "symmetric": self.symmetric,
            "blockable_moved": self.blockable_moved,
            "timings_ms": {s.label: round(s.elapsed_s * 1000.0, 3) for s in self.stages},
        }


def mix_decompose(
    f: Formula,
    cfg: Config | None = None,
    deadline: float | None = None,
) -> PipelineReport:
    """Run all component decomposers, keep the best left set, then grow it.

    The interference-guided component is skipped on very large inputs, and
    the final blocked-move pass on huge ones (configurable). The input
    formula is not modified; components run on clones.
    """
    cfg = cfg or Config()
    total = f.n_alive
    stages: list[StageSnapshot] = []

    def run(label, fn):
        t0 = time.perf_counter()
        dec = fn()
        stages.append(StageSnapshot(label, len(dec.left_ids), len(dec.right_ids),
                                    time.perf_counter() - t0))
        return dec

    components = [
        run("pure", lambda: pure_decompose(f.clone(), deadline=deadline)),
        run("minpure", lambda: min_pure_decompose(f.clone(), cfg, deadline=deadline)),
        run("maxpure", lambda: max_pure_decompose(f.clone(), cfg, deadline=deadline)),
    ]
    best = components[0]
    for dec in components[1:]:
        if len(dec.left_ids) > len(best.left_ids):
            best = dec
    if total < INTERFERE_MAX_CLAUSES and f.n_vars < INTERFERE_MAX_VARS:
        d4 = run("lessinterfere",
                 lambda: less_interfere_decompose(f.clone(), cfg, deadline=deadline))
        if len(d4.left_ids) > len(best.left_ids):
            best = d4
    stages.append(StageSnapshot("best_component", len(best.left_ids),
                                len(best.right_ids), 0.0))

    guided = run(
        "rsetguided",
        lambda: rset_guided_decompose(
            f.clone(), best.right_ids, cfg, strict=False, deadline=deadline
        ),
    )
    if len(guided.left_ids) < len(best.left_ids):
        raise PostconditionViolation(
            "guided re-split shrank the left set "
            f"({len(guided.left_ids)} < {len(best.left_ids)})"
        )
    left, right, trace = guided.left_ids, guided.right_ids, guided.trace

    skip_move = (
        cfg.skip_final_move == "on"
        or (cfg.skip_final_move == "auto" and total > SKIP_FINAL_MOVE_CLAUSES)
    )
    if not skip_move:
        t0 = time.perf_counter()
        left2, right2, trace = move_blocked_clause(left, right, f, trace, deadline=deadline)
        stages.append(StageSnapshot("moveblocked", len(left2), len(right2),
                                    time.perf_counter() - t0))
        if len(left2) < len(left):
            raise PostconditionViolation("blocked-move pass shrank the left set")
        left, right = left2, right2

    blockable_moved = 0
    if cfg.blockable:
        t0 = time.perf_counter()
        left3, right3 = move_blockable_clause(left, right, f, trace)
        blockable_moved = len(left3) - len(left)
        stages.append(StageSnapshot("moveblockable", len(left3), len(right3),
                                    time.perf_counter() - t0))
        left, right = left3, right3

    t0 = time.perf_counter()
    symmetric = verify_solvable(f, left) and verify_solvable(f, right)
    verify_s = time.perf_counter() - t0

    final = Decomposition(
        left, right, "mix", total,
        phase_times={
            **{s.label: s.elapsed_s for s in stages},
            "verify": verify_s,
        },
        trace=trace,
        verified=symmetric,
        meta={"touch_drops": guided.meta.get("touch_drops", 0)},
    )
    return PipelineReport(stages=stages, final=final, symmetric=symmetric,
                          blockable_moved=blockable_moved)
