"""Brute-force reference implementations used only by tests.

Everything here works on plain literal tuples, is written straight from the
definitions, and shares no code with the production elimination engine.
Enumeration bounds keep the full property suites fast at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .cnf import Formula
from .errors import TooLarge

MAX_SUBSET_CLAUSES = 18
MAX_TRUTH_TABLE_VARS = 20


def _resolvent_is_tautology(c: frozenset, d: frozenset, l: int) -> bool:
    resolvent = (c - {l}) | (d - {-l})
    return any(-x in resolvent for x in resolvent)


def _blocked(i: int, l: int, sets: dict[int, frozenset]) -> bool:
    c = sets[i]
    if -l in c:
        return True
    for j, d in sets.items():
        if j != i and -l in d and not _resolvent_is_tautology(c, d, l):
            return False
    return True


def bce_fixpoint_lits(
    clauses: Sequence[Sequence[int]], order: Sequence[int] | None = None
) -> tuple[set[int], set[int], dict[int, int]]:
    """Unrestricted elimination to fixpoint over plain literal tuples.

    Scans the clauses in the given index order (default: as listed),
    removing any blocked clause, until a full pass removes nothing.
    Returns (surviving indices, eliminated indices, index -> blocking literal).
    """
    sets = {i: frozenset(c) for i, c in enumerate(clauses)}
    scan = list(order) if order is not None else list(range(len(clauses)))
    trace: dict[int, int] = {}
    changed = True
    while changed:
        changed = False
        for i in scan:
            if i not in sets:
                continue
            for l in clauses[i]:
                if _blocked(i, l, sets):
                    del sets[i]
                    trace[i] = l
                    changed = True
                    break
    return set(sets), set(trace), trace


def bce_solvable_lits(clauses: Sequence[Sequence[int]]) -> bool:
    surviving, _, _ = bce_fixpoint_lits(clauses)
    return not surviving


def oracle_bce_fixpoint(
    f: Formula, order: Sequence[int] | None = None
) -> tuple[set[int], set[int], dict[int, int]]:
    """Unrestricted fixpoint over the alive clauses of f, keyed by clause id."""
    ids = f.alive_ids()
    lits = [f.clauses[cid].literals for cid in ids]
    if order is not None:
        pos = {cid: k for k, cid in enumerate(ids)}
        scan = [pos[cid] for cid in order]
    else:
        scan = None
    surviving, eliminated, trace = bce_fixpoint_lits(lits, scan)
    return (
        {ids[k] for k in surviving},
        {ids[k] for k in eliminated},
        {ids[k]: l for k, l in trace.items()},
    )


@dataclass
class MaxBsResult:
    best_ids: set[int]
    best_size: int
    explored: int


def oracle_max_blocked_subset(f: Formula) -> MaxBsResult:
    """Largest fully-eliminable clause subset, by exhaustive enumeration.

    Subsets are tried in decreasing size, so the first hit is optimal.
    Bounded at 18 alive clauses.
    """
    ids = f.alive_ids()
    if len(ids) > MAX_SUBSET_CLAUSES:
        raise TooLarge(f"{len(ids)} clauses exceeds the {MAX_SUBSET_CLAUSES}-clause bound")
    lits = {cid: f.clauses[cid].literals for cid in ids}
    explored = 0
    for size in range(len(ids), -1, -1):
        for combo in itertools.combinations(ids, size):
            explored += 1
            if bce_solvable_lits([lits[cid] for cid in combo]):
                return MaxBsResult(set(combo), size, explored)
    return MaxBsResult(set(), 0, explored)


def oracle_score(f: Formula) -> dict[int, tuple[int, int, int]]:
    """Per alive clause: (exact interfering degree, full and restricted approximations).

    The exact degree counts non-tautological resolvents the clause forms
    with the rest of the formula; the approximations count complementary
    literal pairs, the restricted one only through minimum-occurrence
    literals.
    """
    alive = [c for c in f.clauses if c.alive]
    if len(alive) > 500:
        raise TooLarge("scoring oracle is bounded at 500 alive clauses")
    counts: dict[int, int] = {}
    for c in alive:
        for l in c.literals:
            counts[l] = counts.get(l, 0) + 1
    m = min(counts.values()) if counts else 0
    out: dict[int, tuple[int, int, int]] = {}
    for c in alive:
        cset = frozenset(c.literals)
        exact = 0
        approx = 0
        restricted = 0
        for l in c.literals:
            for d in alive:
                if -l not in d.lit_set:
                    continue
                approx += 1
                if counts.get(l, 0) == m:
                    restricted += 1
                if not _resolvent_is_tautology(cset, d.lit_set, l):
                    exact += 1
        out[c.id] = (exact, approx, restricted)
    return out


@lru_cache(maxsize=64)
def _truth_columns(n: int) -> tuple[int, ...]:
    """Bit column i holds variable i's value across all 2^n assignments."""
    total = 1 << n
    cols = []
    for i in range(n):
        run = 1 << i
        block = ((1 << run) - 1) << run
        width = run * 2
        mask = block
        while width < total:
            mask |= mask << width
            width *= 2
        cols.append(mask)
    return tuple(cols)


def oracle_satisfiable(f: Formula, var_order: Sequence[int] | None = None) -> bool:
    """Exhaustive truth-table satisfiability check, bounded at 20 variables.

    The table is evaluated as bit-parallel columns, one bit per assignment.
    var_order optionally fixes which table column each variable maps to (any
    permutation of the occurring variables gives the same answer).
    """
    variables = sorted({abs(l) for c in f.clauses if c.alive for l in c.literals})
    if len(variables) > MAX_TRUTH_TABLE_VARS:
        raise TooLarge(f"{len(variables)} variables exceeds the {MAX_TRUTH_TABLE_VARS}-var bound")
    if var_order is not None:
        if sorted(var_order) != variables:
            raise ValueError("var_order must be a permutation of the occurring variables")
        variables = list(var_order)
    column = {v: i for i, v in enumerate(variables)}
    cols = _truth_columns(len(variables))
    full = (1 << (1 << len(variables))) - 1
    acc = full
    for c in f.clauses:
        if not c.alive:
            continue
        mask = 0
        for l in c.literals:
            col = cols[column[abs(l)]]
            mask |= col if l > 0 else (full ^ col)
        acc &= mask
        if not acc:
            return False
    return True
