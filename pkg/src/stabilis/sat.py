"""CNF formulas and the symmetric two-player game built from them.

The game's actions are the variables, the literals, the clauses and a
default action ``f``. Uniform play over the literals of a satisfying
assignment is an envy-proof equilibrium; ``(f, f)`` is an equilibrium that
is never envy-proof; nothing else is an equilibrium.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from stabilis.game import Game, MixedProfile

VAR, LIT, CLAUSE, DEFAULT = "var", "lit", "clause", "default"


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise DimacsError("formula needs at least one variable")
        cleaned = []
        for k, clause in enumerate(self.clauses):
            if not clause:
                raise DimacsError(f"clause {k + 1} is empty")
            lits = tuple(dict.fromkeys(int(l) for l in clause))
            for l in lits:
                if l == 0 or abs(l) > self.num_vars:
                    raise DimacsError(f"clause {k + 1}: variable {abs(l)} out of range")
                if -l in lits:
                    raise DimacsError(f"clause {k + 1} contains both {abs(l)} and -{abs(l)}")
            cleaned.append(lits)
        object.__setattr__(self, "clauses", tuple(cleaned))

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        true_lits = set(assignment)
        return all(any(l in true_lits for l in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF. Duplicate literals in a clause are merged."""
    header = None
    clauses = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed problem line {line!r}") from None
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(f"line {lineno}: variable {abs(lit)} out of range")
                current.append(lit)
    if header is None:
        raise DimacsError("missing problem line")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def format_literal(lit: int) -> str:
    return f"{'+' if lit > 0 else '-'}x{abs(lit)}"


def format_clause(clause: Sequence[int]) -> str:
    return "(" + "|".join(format_literal(l).lstrip("+") for l in clause) + ")"


def lit_set(formula: CnfFormula, item: tuple) -> frozenset[int]:
    """Literals of a variable ``(VAR, v)`` or a clause ``(CLAUSE, k)``."""
    kind, ref = item
    if kind == VAR:
        if not 1 <= ref <= formula.num_vars:
            raise ValueError(f"no variable {ref}")
        return frozenset((ref, -ref))
    if kind == CLAUSE:
        return frozenset(formula.clauses[ref])
    raise ValueError(f"LitSet is defined on variables and clauses, not {kind}")


@dataclass(frozen=True)
class GadgetGame:
    formula: CnfFormula
    game: Game
    actions: tuple[tuple, ...]
    beta: Fraction

    def index(self, action: tuple) -> int:
        return self.actions.index(action)

    def literal_index(self, lit: int) -> int:
        return self.actions.index((LIT, lit))


def gadget_actions(formula: CnfFormula) -> tuple[tuple, ...]:
    n = formula.num_vars
    acts = [(VAR, v) for v in range(1, n + 1)]
    for v in range(1, n + 1):
        acts += [(LIT, v), (LIT, -v)]
    acts += [(CLAUSE, k) for k in range(len(formula.clauses))]
    acts.append((DEFAULT, None))
    return tuple(acts)


def action_label(formula: CnfFormula, action: tuple) -> str:
    kind, ref = action
    if kind == VAR:
        return f"x{ref}"
    if kind == LIT:
        return format_literal(ref)
    if kind == CLAUSE:
        return format_clause(formula.clauses[ref])
    return "f"


def build_game(formula: CnfFormula) -> GadgetGame:
    n = formula.num_vars
    beta = Fraction(-n)
    acts = gadget_actions(formula)
    lits = {a: lit_set(formula, a) for a in acts if a[0] in (VAR, CLAUSE)}

    def row_payoff(a, b):
        # payoff of the player choosing a against b; the game is symmetric
        if a[0] == DEFAULT:
            if b[0] == DEFAULT:
                return n + 2
            return n - 1 if b[0] == LIT else n
        if b[0] == DEFAULT:
            return n - 1 if a[0] == LIT else n + 1
        if a[0] == LIT and b[0] == LIT:
            return beta if a[1] == -b[1] else n - 1
        if a[0] != LIT and b[0] != LIT:
            return beta
        if a[0] != LIT:
            return 0 if b[1] in lits[a] else n
        return 2 * (n - 1) if a[1] in lits[b] else n - 2

    size = len(acts)
    u0 = np.empty((size, size), dtype=object)
    for r, a in enumerate(acts):
        for c, b in enumerate(acts):
            u0[r, c] = Fraction(row_payoff(a, b))
    labels = [action_label(formula, a) for a in acts]
    game = Game([u0, u0.T.copy()], (size, size), [labels, labels])
    return GadgetGame(formula, game, acts, beta)


def assignment_to_profile(gadget: GadgetGame, assignment: Sequence[int]) -> MixedProfile:
    """Both players uniform over the literal actions of ``assignment``."""
    n = gadget.formula.num_vars
    chosen = sorted(set(int(l) for l in assignment), key=abs)
    if len(chosen) != n or sorted(abs(l) for l in chosen) != list(range(1, n + 1)):
        raise ValueError("assignment must give exactly one literal per variable")
    size = len(gadget.actions)
    vec = MixedProfile.uniform_over(size, [gadget.literal_index(l) for l in chosen])
    return MixedProfile((vec, vec))
