"""Command-line front end.

Exit codes: 0 success (whatever the verdict), 2 invalid input, 3 numerical
failure, 4 unwritable output path. Set ``HOTELLING_LOG`` (e.g. ``DEBUG``)
for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

from .distributions import FAMILIES, from_dict
from .equilibrium import (
    alpha_beta_curves,
    canonical_pair,
    closed_form_canonical,
    decide_equilibrium,
    exp_asym_alpha0,
    exp_asym_threshold,
    exp_sym_threshold,
    exp_sym_threshold_sharp,
    pareto_residual,
    pareto_threshold,
)
from .errors import NoClosedForm, NumericalFailure, PreconditionError
from .game import GameSpec, Profile, Variant, h_prime, m_prime, profile_utilities
from .oracle import SimulationConfig, candidate_profile, find_improving_move, simulate_utilities

log = logging.getLogger("hotelling")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
SIG_DIGITS = 12
MAX_SWEEP_POINTS = 10**6


class InputError(ValueError):
    pass


class OutputError(OSError):
    pass


def fmt(x: float) -> str:
    return format(x, f".{SIG_DIGITS}g")


def rounded(obj: Any) -> Any:
    """Round every float in a JSON-like tree to 12 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


# ------------------------------------------------------------------ game input


def _load_json_arg(text: str) -> Any:
    text = text.strip()
    if not text.startswith("{"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise InputError(f"cannot read game file: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid game JSON: {exc}") from None


def dist_from_args(args: argparse.Namespace) -> dict[str, Any]:
    family = args.family
    if family is None:
        raise InputError("give --game or --family")
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}")
    d: dict[str, Any] = {"family": family}
    need = {"linear": ("r",), "pareto": ("alpha",), "exponential": ("lam",)}.get(family, ())
    for name in need:
        if getattr(args, name) is None:
            raise InputError(f"family {family} needs --{'lambda' if name == 'lam' else name}")
    if family == "linear":
        d["r"] = args.r
    elif family == "pareto":
        d["alpha"] = args.alpha
        if args.xi is not None:
            d["xi"] = args.xi
    elif family == "exponential":
        d["lambda"] = args.lam
    return d


def game_from_args(args: argparse.Namespace, n: int | None = None) -> GameSpec:
    if getattr(args, "game", None):
        data = _load_json_arg(args.game)
        if not isinstance(data, dict):
            raise InputError("game JSON must be an object")
        return GameSpec.from_dict(data)
    count = n if n is not None else args.n
    if count is None:
        raise InputError("give --n")
    return GameSpec(count, from_dict(dist_from_args(args)), Variant(args.variant))


# ---------------------------------------------------------------------- output


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(str(exc)) from None


def to_json(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], preamble: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in preamble:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v) if math.isfinite(v) else ""
    return str(v)


# -------------------------------------------------------------------- commands


def cmd_canonical(args: argparse.Namespace) -> str:
    game = game_from_args(args)
    hp, mp = h_prime(game, 0.5), m_prime(game, 0.0)
    pair = canonical_pair(game)
    if args.pretty:
        cmp = "<=" if hp <= mp else ">"
        if pair is None:
            return f"none (H'(1/2)={fmt(hp)} {cmp} M'(0)={fmt(mp)})\n"
        return f"a={fmt(pair.a)} b={fmt(pair.b)} profile={[fmt(s) for s in pair.profile.locations]}\n"
    return to_json(
        {
            "game": game.to_dict(),
            "h_prime_half": hp,
            "m_prime_zero": mp,
            "pair": None if pair is None else pair.to_dict(),
        }
    )


def cmd_check(args: argparse.Namespace) -> str:
    game = game_from_args(args)
    report = decide_equilibrium(game)
    out: dict[str, Any] = {"game": game.to_dict(), "report": report.to_dict()}
    if args.empirical:
        grid = args.grid if args.grid is not None else 1e-3
        prof = candidate_profile(game)
        move = find_improving_move(game, prof, grid_step=grid)
        emp: dict[str, Any] = {
            "grid": grid,
            "profile": prof.to_list(),
            "verified": move is None,
            "improving_move": None if move is None else move.to_dict(),
            "agrees": (move is None) == report.exists,
        }
        if args.clients:
            est = simulate_utilities(game, prof, SimulationConfig(args.clients, args.seed))
            emp["simulation"] = est.to_dict()
        out["empirical"] = emp
    if args.pretty:
        r = report
        lines = [f"exists={r.exists} reason={r.reason.value}"]
        if r.pair is not None:
            lines.append(f"a={fmt(r.pair.a)} b={fmt(r.pair.b)}")
        if r.peripheral_margin is not None:
            lines.append(f"peripheral_margin={fmt(r.peripheral_margin)} internal_margin={fmt(r.internal_margin)}")
        lines.extend(f"warning: {w}" for w in r.warnings)
        if args.empirical:
            lines.append(f"empirical verified={out['empirical']['verified']}")
        return "\n".join(lines) + "\n"
    return to_json(out)


def parse_n_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = (int(p) for p in text.split(":", 1))
            values = list(range(lo, hi + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise InputError(f"bad --n value {text!r}; expected N or LO:HI") from None
    if not values:
        raise InputError(f"empty n range {text!r}")
    return values


def cmd_threshold(args: argparse.Namespace) -> str:
    family, variant = args.family, Variant(args.variant)
    ns = parse_n_range(args.n or "3:10")
    if family == "pareto":
        if variant is not Variant.SYMMETRIC:
            raise InputError("the pareto shape threshold is only known for the symmetric variant")
        z = pareto_threshold()
        if args.format == "json":
            return to_json({"z": z, "residual": pareto_residual(z)})
        return to_csv(["z", "residual"], [[z, pareto_residual(z)]])
    if family != "exponential":
        raise InputError(f"no threshold for family {family!r}")
    if min(ns) < 3:
        raise InputError("thresholds are defined for n >= 3")
    if variant is Variant.ASYMMETRIC:
        a0, b0 = exp_asym_alpha0()
        rows = [[n, exp_asym_threshold(n)] for n in ns]
        if args.format == "json":
            return to_json({"alpha0": a0, "beta0": b0, "rows": [{"n": n, "threshold": t} for n, t in rows]})
        return to_csv(["n", "threshold"], rows, preamble=[f"# alpha0={fmt(a0)},beta0={fmt(b0)}"])
    rows = [[n, exp_sym_threshold(n), exp_sym_threshold_sharp(n)] for n in ns]
    if args.format == "json":
        return to_json({"rows": [{"n": n, "threshold": t, "sharp_threshold": s} for n, t, s in rows]})
    return to_csv(["n", "threshold", "sharp_threshold"], rows)


class Axis(str, Enum):
    LAMBDA = "lambda"
    ALPHA = "alpha"
    N = "n"
    PARETO_SHAPE = "pareto-shape"


@dataclass(frozen=True)
class SweepSpec:
    axis: Axis
    start: float
    stop: float
    step: float
    fixed: dict[str, Any]

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        if not all(math.isfinite(v) for v in (self.start, self.stop, self.step)):
            raise InputError("sweep range must be finite")
        if not self.start < self.stop:
            raise InputError("sweep needs start < stop")
        if not self.step > 0:
            raise InputError("sweep needs step > 0")
        if (self.stop - self.start) / self.step > MAX_SWEEP_POINTS:
            raise InputError(f"sweep has more than {MAX_SWEEP_POINTS} points")

    def values(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [self.start + k * self.step for k in range(count + 1)]


SWEEP_TAIL = ["a", "b", "peripheral_margin", "internal_margin", "exists"]
ALPHA_HEADER = ["alpha", "beta1", "beta2", "gap", "lambda", "a", "b", "exists"]


def _verdict_row(game: GameSpec) -> list[Any]:
    r = decide_equilibrium(game)
    a = r.pair.a if r.pair is not None else None
    b = r.pair.b if r.pair is not None else None
    return [a, b, r.peripheral_margin, r.internal_margin, r.exists]


def sweep_rows(spec: SweepSpec, args: argparse.Namespace) -> tuple[list[str], list[list[Any]]]:
    variant = Variant(args.variant)
    if spec.axis is Axis.ALPHA:
        n = args.n or 3
        rows = []
        for al in spec.values():
            b1, b2 = alpha_beta_curves(al)
            lam = al * (n + 1) - 2.0 * math.log1p(0.5 * (al - 1.0))
            game = GameSpec(n, from_dict({"family": "exponential", "lambda": lam}), Variant.ASYMMETRIC)
            pair = closed_form_canonical(game.dist, Variant.ASYMMETRIC, n)
            rows.append([al, b1, b2, b1 - b2, lam, pair.a, pair.b, decide_equilibrium(game).exists])
        return ALPHA_HEADER, rows
    if spec.axis is Axis.N:
        lo, hi = int(spec.start), int(spec.stop)
        if lo != spec.start or hi != spec.stop or spec.step != int(spec.step) or lo < 2:
            raise InputError("an n sweep needs integer start >= 2, stop and step")
        base = from_dict(dist_from_args(args))
        rows = [[n] + _verdict_row(GameSpec(n, base, variant)) for n in range(lo, hi + 1, int(spec.step))]
        return ["n"] + SWEEP_TAIL, rows
    n = args.n
    if n is None:
        raise InputError("give --n for this sweep")
    rows = []
    for v in spec.values():
        if spec.axis is Axis.LAMBDA:
            dist = {"family": "exponential", "lambda": v}
        else:
            dist = {"family": "pareto", "alpha": v, "xi": args.xi if args.xi is not None else 0.01}
        rows.append([v, n] + _verdict_row(GameSpec(n, from_dict(dist), variant)))
    first = "lambda" if spec.axis is Axis.LAMBDA else "alpha"
    return [first, "n"] + SWEEP_TAIL, rows


def cmd_sweep(args: argparse.Namespace) -> str:
    spec = SweepSpec(args.axis, args.start, args.stop, args.step, {})
    header, rows = sweep_rows(spec, args)
    log.info("sweep %s: %d rows", spec.axis.value, len(rows))
    if args.format == "json":
        return to_json([dict(zip(header, r)) for r in rows])
    return to_csv(header, rows)


def parse_profile(text: str) -> Profile:
    try:
        return Profile.of(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise InputError(f"bad --profile: {exc}") from None


def cmd_simulate(args: argparse.Namespace) -> str:
    if not args.profile:
        raise InputError("simulate needs --profile")
    prof = parse_profile(args.profile)
    game = game_from_args(args, n=args.n if args.n is not None else max(2, prof.n))
    est = simulate_utilities(game, prof, SimulationConfig(args.clients or 100_000, args.seed), workers=args.workers)
    analytic = profile_utilities(game, prof).totals
    if args.pretty:
        lines = [
            f"player {i}: mc={fmt(m)} se={fmt(s)} analytic={fmt(u)}"
            for i, ((m, s), u) in enumerate(zip(est.per_player, analytic))
        ]
        return "\n".join(lines) + "\n"
    return to_json({"game": game.to_dict(), "profile": prof.to_list(), "estimate": est.to_dict(), "analytic": analytic})


# ---------------------------------------------------------------------- parser


def _add_game_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", help="game JSON object or path to a JSON file")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--variant", choices=[v.value for v in Variant], default="symmetric")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--r", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotelling", description="Equilibria of Hotelling games with tolerance ranges.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonical", help="solve the canonical pair")
    _add_game_flags(p)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("check", help="decide equilibrium existence")
    _add_game_flags(p)
    p.add_argument("--empirical", action="store_true", help="confirm by grid best-response search")
    p.add_argument("--grid", type=float)
    p.add_argument("--clients", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("threshold", help="tabulate existence thresholds")
    p.add_argument("--family", choices=["exponential", "pareto"], required=True)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="symmetric")
    p.add_argument("--n", help="N or LO:HI (default 3:10)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="verdicts over a parameter grid")
    _add_game_flags(p)
    p.add_argument("--axis", choices=[a.value for a in Axis], required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo utilities of a profile")
    _add_game_flags(p)
    p.add_argument("--profile", help="comma-separated locations")
    p.add_argument("--clients", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("HOTELLING_LOG")
    if level:
        logging.basicConfig(level=level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
        emit(text, getattr(args, "out", None))
    except OutputError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, PreconditionError, NoClosedForm, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
