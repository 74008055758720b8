"""CNF formulas with per-literal occurrence indexing and DIMACS I/O.

Literals are nonzero signed integers: variable v occurs positively as v and
negatively as -v. Clause deletion is lazy: a killed clause keeps its slot and
its occurrence entries, traversals skip it, and an occurrence list is
compacted once more than half of its entries are dead.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, Sequence

from .errors import ConflictDetected, InternalError, ParseError

log = logging.getLogger(__name__)

_EMPTY: list[int] = []


class Clause:
    """An ordered, duplicate-free sequence of literals with a stable id."""

    __slots__ = ("id", "literals", "lit_set", "taut_vars", "alive", "score")

    def __init__(self, cid: int, literals: Sequence[int]):
        self.id = cid
        self.literals = tuple(literals)
        self.lit_set = frozenset(self.literals)
        self.taut_vars = tuple(sorted({l for l in self.literals if l > 0 and -l in self.lit_set}))
        self.alive = True
        self.score = 0

    def __len__(self) -> int:
        return len(self.literals)

    def __repr__(self) -> str:
        state = "" if self.alive else ", dead"
        return f"Clause({self.id}, {self.literals}{state})"


def tautology(c: Clause) -> bool:
    """True iff some variable occurs in both polarities in c."""
    return bool(c.taut_vars)


class Formula:
    """Clause arena plus literal -> clause-id occurrence index."""

    def __init__(self):
        self.clauses: list[Clause] = []
        self.occ: dict[int, list[int]] = {}
        self._live: dict[int, int] = {}
        self.n_vars = 0
        self.n_alive = 0

    # -- construction ------------------------------------------------------

    def add_clause(self, literals: Iterable[int]) -> Clause:
        """Append a clause; duplicate literals are dropped, first occurrence wins."""
        seen = set()
        lits = []
        for l in literals:
            if l == 0:
                raise ValueError("0 is not a literal")
            if l not in seen:
                seen.add(l)
                lits.append(l)
        c = Clause(len(self.clauses), lits)
        self.clauses.append(c)
        occ = self.occ
        live = self._live
        for l in lits:
            lst = occ.get(l)
            if lst is None:
                occ[l] = [c.id]
            else:
                lst.append(c.id)
            live[l] = live.get(l, 0) + 1
            v = l if l > 0 else -l
            if v > self.n_vars:
                self.n_vars = v
        self.n_alive += 1
        return c

    def clone(self) -> "Formula":
        """Deep copy preserving ids, liveness, and occurrence order."""
        g = Formula.__new__(Formula)
        g.clauses = []
        for c in self.clauses:
            d = Clause.__new__(Clause)
            d.id = c.id
            d.literals = c.literals
            d.lit_set = c.lit_set
            d.taut_vars = c.taut_vars
            d.alive = c.alive
            d.score = c.score
            g.clauses.append(d)
        g.occ = {l: list(ids) for l, ids in self.occ.items()}
        g._live = dict(self._live)
        g.n_vars = self.n_vars
        g.n_alive = self.n_alive
        return g

    def induced(self, ids: Iterable[int]) -> "Formula":
        """New formula over the selected clauses (fresh ids, ascending source id)."""
        g = Formula()
        for cid in sorted(ids):
            g.add_clause(self.clauses[cid].literals)
        return g

    # -- queries -----------------------------------------------------------

    @property
    def n_clauses_alive(self) -> int:
        return self.n_alive

    def live_count(self, lit: int) -> int:
        return self._live.get(lit, 0)

    def alive_ids(self) -> list[int]:
        return [c.id for c in self.clauses if c.alive]

    def alive_clauses(self) -> list[Clause]:
        return [c for c in self.clauses if c.alive]

    def has_empty_clause(self) -> bool:
        return any(c.alive and not c.literals for c in self.clauses)

    def occ_list(self, lit: int) -> list[int]:
        """Raw occurrence list for lit, compacted when mostly dead.

        Entries may still reference dead clauses; callers must skip them and
        must not kill clauses while iterating the returned list.
        """
        lst = self.occ.get(lit)
        if not lst:
            return _EMPTY
        if len(lst) > 8 and len(lst) > 2 * self._live.get(lit, 0):
            clauses = self.clauses
            lst[:] = [cid for cid in lst if clauses[cid].alive]
        return lst

    def occ_alive(self, lit: int) -> list[int]:
        """Snapshot of the alive clause ids containing lit (safe to kill while using)."""
        clauses = self.clauses
        return [cid for cid in self.occ_list(lit) if clauses[cid].alive]

    # -- mutation ----------------------------------------------------------

    def kill(self, cid: int) -> None:
        """Lazily delete one alive clause, keeping the live counts exact."""
        c = self.clauses[cid]
        if not c.alive:
            raise InternalError(f"clause {cid} is already dead")
        c.alive = False
        self.n_alive -= 1
        live = self._live
        for l in c.literals:
            live[l] -= 1


def formula_from_clauses(clauses: Iterable[Iterable[int]], n_vars: int = 0) -> Formula:
    f = Formula()
    for lits in clauses:
        f.add_clause(lits)
    if n_vars > f.n_vars:
        f.n_vars = n_vars
    return f


# -- DIMACS ---------------------------------------------------------------


def parse_dimacs(text: str | bytes) -> Formula:
    """Parse DIMACS CNF text into a Formula.

    Comment lines start with 'c'; the single header is `p cnf <vars>
    <clauses>`; clauses are 0-terminated and may span lines. A clause count
    mismatch against the header and an unterminated final clause are
    tolerated with a warning; empty clauses are accepted and flagged.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not decodable text: {exc}") from exc

    header: tuple[int, int] | None = None
    f = Formula()
    buf: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        if line[0] == "p":
            if header is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: non-integer header field") from exc
            if nv < 0 or nc < 0:
                raise ParseError(f"line {lineno}: negative header count")
            header = (nv, nc)
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause data before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: non-integer token {tok!r}") from exc
            if lit == 0:
                c = f.add_clause(buf)
                if not c.literals:
                    log.warning("empty clause %d: formula is trivially unsatisfiable", c.id)
                buf.clear()
            else:
                buf.append(lit)

    if header is None:
        raise ParseError("missing 'p cnf' header")
    if buf:
        log.warning("unterminated final clause; accepting %d literals", len(buf))
        f.add_clause(buf)
        buf.clear()
    if len(f.clauses) != header[1]:
        log.warning("header declares %d clauses, found %d", header[1], len(f.clauses))
    if header[0] > f.n_vars:
        f.n_vars = header[0]
    return f


def serialize_dimacs(f: Formula, ids: Iterable[int] | None = None) -> str:
    """Serialize the selected clauses (default: all alive) as DIMACS text.

    Bit-exact format: header, one clause per line, space-separated literals,
    trailing " 0", "\\n" line ends. Clauses are emitted in ascending id order.
    """
    if ids is None:
        selected = f.alive_ids()
    else:
        selected = sorted(ids)
    n = len(f.clauses)
    max_var = 0
    lines = []
    for cid in selected:
        if not 0 <= cid < n:
            raise InternalError(f"unknown clause id {cid}")
        lits = f.clauses[cid].literals
        for l in lits:
            v = l if l > 0 else -l
            if v > max_var:
                max_var = v
        lines.append(" ".join(map(str, lits)) + " 0" if lits else "0")
    out = [f"p cnf {max_var} {len(selected)}"]
    out.extend(lines)
    return "\n".join(out) + "\n"


# -- unit simplification ---------------------------------------------------


def unit_simplify(f: Formula) -> tuple[Formula, list[int]]:
    """Propagate unit clauses to fixpoint; return (simplified formula, trail).

    Clauses containing a satisfied literal are dropped, falsified literals
    are stripped from survivors, and one unit clause per forced assignment is
    kept in the result. The input formula is not modified. Raises
    ConflictDetected if propagation empties a clause.
    """
    assign: dict[int, bool] = {}
    trail: list[int] = []
    queue: deque[int] = deque()

    n = len(f.clauses)
    sat = [False] * n
    remaining = [len(c.literals) if c.alive else -1 for c in f.clauses]

    def force(lit: int) -> None:
        v = abs(lit)
        val = lit > 0
        prev = assign.get(v)
        if prev is None:
            assign[v] = val
            trail.append(lit)
            queue.append(lit)
        elif prev != val:
            raise ConflictDetected(f"conflicting forced assignments on variable {v}", trail)

    for c in f.clauses:
        if c.alive and len(c.literals) == 1:
            force(c.literals[0])

    clauses = f.clauses
    while queue:
        lit = queue.popleft()
        # satisfy first so a clause tautological in this variable never shrinks
        for cid in f.occ_list(lit):
            if clauses[cid].alive:
                sat[cid] = True
        for cid in f.occ_list(-lit):
            if not clauses[cid].alive or sat[cid]:
                continue
            remaining[cid] -= 1
            left = remaining[cid]
            if left == 0:
                raise ConflictDetected(
                    f"clause {cid} falsified during unit propagation", trail
                )
            if left == 1:
                for u in clauses[cid].literals:
                    if abs(u) not in assign:
                        force(u)
                        break

    out = Formula()
    for lit in trail:
        out.add_clause((lit,))
    for c in f.clauses:
        if not c.alive or sat[c.id]:
            continue
        # at fixpoint every assigned-variable literal left here is falsified
        out.add_clause(l for l in c.literals if abs(l) not in assign)
    return out, trail
