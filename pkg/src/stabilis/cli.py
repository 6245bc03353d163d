"""Command-line interface.

Every command prints a report: ``key=value`` lines with ``--format
records``, an aligned human-readable block otherwise. Exit codes:

    0  solved / decided positively
    1  decided negatively (e.g. no immune Nash equilibrium)
    2  usage or input error
    3  budget exceeded, results partial
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from stabilis import approx, multiplayer, sat, solvers, stability
from stabilis.game import (
    Game,
    GameFormatError,
    MixedProfile,
    ShapeError,
    parse_game,
    parse_profile,
    serialize_game,
    serialize_profile,
)
from stabilis.rational import fmt, parse_rational

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Report:
    """Ordered results plus the exit code they imply."""

    def __init__(self, command: str):
        self.command = command
        self.records: list[tuple[str, str]] = []
        self.exit_code = EXIT_OK

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "yes" if value else "no"
        elif isinstance(value, Fraction):
            value = fmt(value)
        self.records.append((key, str(value)))

    def render(self, style: str) -> str:
        rows = [("command", self.command)] + self.records + [("exit", str(self.exit_code))]
        if style == "records":
            return "".join(f"{k}={v}\n" for k, v in rows)
        width = max(len(k) for k, _ in rows)
        lines = [f"stabilis {self.command}"]
        for k, v in rows[1:]:
            lines.append(f"  {k.ljust(width)}  {_humanize(v)}")
        return "\n".join(lines) + "\n"


def _humanize(v: str) -> str:
    # decimal hints only in human mode, and only for single non-integer rationals
    if "/" in v and "," not in v and " " not in v:
        try:
            q = parse_rational(v)
        except ValueError:
            return v
        return f"{v}  (~{float(q):.6g})"
    return v


def _read(path: str) -> tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()[:16]


def _load_game(report: Report, path: str) -> Game:
    text, digest = _read(path)
    report.add("game.sha256", digest)
    try:
        return parse_game(text)
    except (GameFormatError, ShapeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_profile(report: Report, path: str, g: Game) -> MixedProfile:
    text, digest = _read(path)
    report.add("profile.sha256", digest)
    try:
        return parse_profile(text, g)
    except GameFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _budget(args) -> Optional[int]:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("STABILIS_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"STABILIS_BUDGET must be an integer, got {env!r}") from None
    return None


def _add_profile(report: Report, key: str, x: MixedProfile) -> None:
    for i, vec in enumerate(x.vectors):
        report.add(f"{key}.{i}", ",".join(fmt(p) for p in vec))


def _write_profile(args, x: MixedProfile) -> None:
    if getattr(args, "write_profile", None):
        Path(args.write_profile).write_text(serialize_profile(x))


def _add_gaps(report: Report, g: Game, x: MixedProfile, prefix: str = "") -> None:
    n, i, e = stability.gaps(g, x)
    report.add(f"{prefix}nash_gap", n)
    report.add(f"{prefix}immune_gap", i)
    report.add(f"{prefix}envy_gap", e)


def _deviation(g: Game, dev) -> str:
    return f"{dev.player}:{g.label(dev.player, dev.action)}"


# -- commands --------------------------------------------------------------


def cmd_check(args, report: Report) -> None:
    g = _load_game(report, args.game)
    x = _load_profile(report, args.profile, g)
    if args.eps < 0:
        raise UsageError("--eps must be non-negative")
    r = stability.classify(g, x, args.eps)
    report.add("eps", r.eps)
    for notion in stability.NOTIONS:
        report.add(f"{notion}_gap", r.gap(notion))
    for notion in stability.NOTIONS:
        report.add(notion, r.holds(notion))
    for notion in stability.NOTIONS:
        report.add(f"worst.{notion}", _deviation(g, r.worst[notion]))


def cmd_solve_envy_proof(args, report: Report) -> None:
    g = _load_game(report, args.game)
    x = solvers.solve_envy_proof(g)
    _add_profile(report, "profile", x)
    _add_gaps(report, g, x)
    _write_profile(args, x)


def cmd_solve_immune(args, report: Report) -> None:
    g = _load_game(report, args.game)
    try:
        x = solvers.solve_immune(g, args.max_support)
    except solvers.NotFoundWithinSupport:
        report.add("found", False)
        report.exit_code = EXIT_NO
        return
    report.add("found", True)
    _add_profile(report, "profile", x)
    _add_gaps(report, g, x)
    _write_profile(args, x)


def cmd_solve_immune_nash(args, report: Report) -> None:
    g = _load_game(report, args.game)
    d = solvers.decide_immune_nash(g)
    report.add("v0", d.values[0])
    report.add("v1", d.values[1])
    report.add("exists", d.exists)
    if d.exists:
        _add_profile(report, "profile", d.witness)
        _add_gaps(report, g, d.witness)
        _write_profile(args, d.witness)
    else:
        report.exit_code = EXIT_NO


def _add_witness(report: Report, g: Game, key: str, w: solvers.NashWitness) -> None:
    report.add(f"{key}.support.0", ",".join(g.label(0, a) for a in w.supports[0]))
    report.add(f"{key}.support.1", ",".join(g.label(1, a) for a in w.supports[1]))
    _add_profile(report, f"{key}.profile", w.profile)
    report.add(f"{key}.payoffs", ",".join(fmt(v) for v in w.payoffs))
    report.add(f"{key}.degenerate", w.degenerate)
    _add_gaps(report, g, w.profile, prefix=f"{key}.")


def cmd_solve_envy_proof_nash(args, report: Report) -> None:
    g = _load_game(report, args.game)
    w = solvers.find_envy_proof_nash(g, args.max_support)
    report.add("found", w is not None)
    if w is None:
        report.exit_code = EXIT_NO
        return
    _add_witness(report, g, "nash", w)
    _write_profile(args, w.profile)


def cmd_enumerate_nash(args, report: Report) -> None:
    g = _load_game(report, args.game)
    ws = solvers.enumerate_nash(g, args.max_support)
    report.add("count", len(ws))
    for k, w in enumerate(ws, 1):
        _add_witness(report, g, f"eq.{k}", w)


def cmd_reduce_sat(args, report: Report) -> Optional[str]:
    text, _ = _read(args.cnf)
    try:
        formula = sat.parse_dimacs(text)
    except sat.DimacsError as exc:
        raise UsageError(f"{args.cnf}: {exc}") from None
    gadget = sat.build_game(formula)
    out = serialize_game(gadget.game)
    if not args.output:
        return out
    Path(args.output).write_text(out)
    report.add("cnf.vars", formula.num_vars)
    report.add("cnf.clauses", len(formula.clauses))
    report.add("actions", gadget.game.action_counts[0])
    report.add("beta", gadget.beta)
    report.add("output", args.output)
    report.add("game.sha256", hashlib.sha256(out.encode()).hexdigest()[:16])
    return None


def cmd_approx_envy_nash(args, report: Report) -> None:
    g = _load_game(report, args.game)
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    o = approx.approx_envy_nash_search(g, args.eps, args.k, _budget(args))
    report.add("eps", o.eps)
    report.add("k", o.k)
    report.add("candidates", o.num_candidates)
    report.add("scanned", o.scanned)
    report.add("status", o.status)
    report.add("found", o.found_any)
    if o.found_any:
        report.add("best_envy", o.best_envy)
        report.add("witness_nash_gap", o.witness_nash_gap)
        report.add("nonexistence_bound", o.nonexistence_bound)
        _add_profile(report, "profile", o.witness)
        _write_profile(args, o.witness)
    if o.status != approx.COMPLETE:
        report.exit_code = EXIT_BUDGET
    elif not o.found_any:
        report.exit_code = EXIT_NO


def cmd_approx_immune(args, report: Report) -> None:
    g = _load_game(report, args.game)
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    report.add("eps", args.eps)
    try:
        x = approx.approx_immune_search(g, args.eps, args.k, _budget(args))
    except approx.ScanExhausted as exc:
        report.add("found", False)
        report.exit_code = EXIT_BUDGET if "budget" in str(exc) else EXIT_NO
        return
    report.add("found", True)
    _add_profile(report, "profile", x)
    _add_gaps(report, g, x)
    _write_profile(args, x)


def cmd_multi_check(args, report: Report) -> None:
    g = _load_game(report, args.game)
    x = _load_profile(report, args.profile, g)
    if not 1 <= args.t <= g.num_players:
        raise UsageError(f"--t must be between 1 and {g.num_players}")
    if args.eps < 0:
        raise UsageError("--eps must be non-negative")
    try:
        r = multiplayer.coalition_report(g, x, args.t, _budget(args))
    except multiplayer.BudgetExceeded as exc:
        report.add("error", str(exc))
        report.exit_code = EXIT_BUDGET
        return
    report.add("t", args.t)
    report.add("eps", args.eps)
    for notion in stability.NOTIONS:
        gap = getattr(r, f"{notion}_gap")
        report.add(f"{notion}_gap", "n/a" if gap is None else gap)
    for notion in stability.NOTIONS:
        holds = r.holds(notion, args.eps)
        report.add(notion, "n/a" if holds is None else holds)
    for notion in stability.NOTIONS:
        w = r.worst.get(notion)
        if w is None or getattr(r, f"{notion}_gap") is None:
            continue
        who = ",".join(f"{s}:{g.label(s, a)}" for s, a in zip(w.coalition, w.actions))
        report.add(f"worst.{notion}", who)


def cmd_multi_gamma(args, report: Report) -> None:
    g = _load_game(report, args.game)
    report.add("gamma_sensitive", multiplayer.gamma_sensitive(g))
    report.add("gamma_varied", multiplayer.gamma_varied(g))


def cmd_multi_anonymous(args, report: Report) -> None:
    g = _load_game(report, args.game)
    try:
        report.add("anonymous", multiplayer.is_anonymous(g))
    except ShapeError as exc:
        raise UsageError(str(exc)) from None


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "records"), default="human")

    parser = argparse.ArgumentParser(
        prog="stabilis",
        description="Nash equilibria, immunity and envy-proofness for finite games.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def leaf(group, name, func, help_text, game=True):
        p = group.add_parser(name, parents=[common], help=help_text)
        if game:
            p.add_argument("--game", required=True, help="game file")
        p.set_defaults(func=func, path=name)
        return p

    def with_output(p):
        p.add_argument("--write-profile", metavar="PATH", help="also write the profile file")
        return p

    p = leaf(sub, "check", cmd_check, "classify a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--eps", type=_rational_arg, default=Fraction(0))

    solve = sub.add_parser("solve", help="exact solvers").add_subparsers(dest="what", required=True)
    with_output(leaf(solve, "envy-proof", cmd_solve_envy_proof, "an envy-proof profile"))
    p = with_output(leaf(solve, "immune", cmd_solve_immune, "an immune profile"))
    p.add_argument("--max-support", type=int)
    with_output(leaf(solve, "immune-nash", cmd_solve_immune_nash, "decide immune Nash existence"))
    p = with_output(leaf(solve, "envy-proof-nash", cmd_solve_envy_proof_nash, "search for an envy-proof Nash"))
    p.add_argument("--max-support", type=int)

    enum = sub.add_parser("enumerate", help="enumeration").add_subparsers(dest="what", required=True)
    p = leaf(enum, "nash", cmd_enumerate_nash, "all equilibria by support enumeration")
    p.add_argument("--max-support", type=int)

    red = sub.add_parser("reduce", help="reductions").add_subparsers(dest="what", required=True)
    p = leaf(red, "sat", cmd_reduce_sat, "game built from a DIMACS CNF formula", game=False)
    p.add_argument("--cnf", required=True)
    p.add_argument("--output", "-o")

    apx = sub.add_parser("approx", help="k-uniform searches").add_subparsers(dest="what", required=True)
    for name, func in (("envy-nash", cmd_approx_envy_nash), ("immune", cmd_approx_immune)):
        p = with_output(leaf(apx, name, func, f"approximate {name} search"))
        p.add_argument("--eps", type=_rational_arg, required=True)
        p.add_argument("--k", type=int)
        p.add_argument("--budget", type=int)

    multi = sub.add_parser("multi", help="multiplayer checks").add_subparsers(dest="what", required=True)
    p = leaf(multi, "check", cmd_multi_check, "coalition gaps of a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--eps", type=_rational_arg, default=Fraction(0))
    p.add_argument("--budget", type=int)
    leaf(multi, "gamma", cmd_multi_gamma, "gamma-sensitivity and gamma-variation")
    leaf(multi, "anonymous", cmd_multi_anonymous, "anonymity test")
    return parser


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    command = args.cmd if args.cmd == "check" else f"{args.cmd} {args.path}"
    report = Report(command)
    try:
        raw = args.func(args, report)
    except UsageError as exc:
        print(f"stabilis: error: {exc}", file=stderr)
        return EXIT_USAGE
    if raw is not None:
        stdout.write(raw)
        return EXIT_OK
    stdout.write(report.render(args.format))
    return report.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))
