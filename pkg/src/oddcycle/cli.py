"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 runtime or protocol error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import seeding
from .bell import calibrate_visibility, chsh_reference, estimate_omega, nonlocal_content, run_bell_test
from .bounds import BOUNDS_HEADER, bounds_report, closed_form_report
from .bounds.bounds import COMPUTED_N_MAX
from .game import GameSizeError, check_n, omega_c
from .protocol.actors import ROUND_LOG_HEADER
from .protocol.inproc import BATCH, INPROC, TCP, GameConfig, run_game
from .protocol.wire import ProtocolError
from .quantum import NoiseModel, omega_q

log = logging.getLogger("oddcycle")

SWEEP_HEADER = "n,strategy,omega_hat,se,omega_c,omega_q,ratio"
BELL_HEADER = "n,omega_hat,se,pnl,pnl_err"


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _odd_range(text: str) -> list[int]:
    lo, sep, hi = text.partition(":")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO:HI, got {text!r}")
    for v in (lo_i, hi_i):
        if v % 2 == 0 or v < 3:
            raise argparse.ArgumentTypeError(f"n must be odd and >= 3, got {v}")
    return list(range(lo_i, hi_i + 1, 2))


def _noise_args(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--visibility", type=float, help="Werner visibility V in [0, 1]")
    group.add_argument("--target-ratio", type=float, help="calibrate V so that omega/omega_q hits this ratio")
    p.add_argument("--readout-error", type=float, default=0.0, help="symmetric readout flip probability")


def _common(p, rounds=True):
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    if rounds:
        p.add_argument("--rounds", type=int, default=100_000)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oddcycle", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file; command-line flags override it")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("play", help="play the game and report the win rate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strategy", choices=["quantum", "classical"], default="quantum")
    p.add_argument("--transport", choices=[INPROC, TCP, BATCH], default=INPROC)
    p.add_argument("--no-phase-correction", action="store_true", help="Bob skips the herald phase gate")
    p.add_argument("--round-timeout", type=float, default=5.0)
    p.add_argument("--log", help="write the per-round CSV log here")
    _noise_args(p)
    _common(p)

    p = sub.add_parser("sweep", help="win rates over a range of n (CSV)")
    p.add_argument("--n-range", type=_odd_range, default=_odd_range("3:27"))
    p.add_argument("--strategy", choices=["quantum", "classical", "both"], default="both")
    p.add_argument("--transport", choices=[INPROC, TCP, BATCH], default=BATCH)
    p.add_argument("--out", help="CSV output path (default stdout)")
    _noise_args(p)
    _common(p)

    p = sub.add_parser("bell", help="Bell-test mode and nonlocal content (CSV)")
    p.add_argument("--n-range", type=_odd_range, default=_odd_range("3:27"))
    p.add_argument("--transport", choices=[INPROC, TCP], default=INPROC)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--report", help="write a key=value report here")
    p.add_argument("--log", help="per-round log (single n only)")
    _noise_args(p)
    _common(p)

    p = sub.add_parser("bounds", help="independence / Lovász / fractional packing numbers (CSV)")
    p.add_argument("--n-range", type=_odd_range, default=_odd_range(f"3:{COMPUTED_N_MAX}"))
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = sub.add_parser("serve", help="run the referee service")
    p.add_argument("--endpoint", default="127.0.0.1:7700")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strategy", choices=["quantum", "classical"], default="quantum")
    p.add_argument("--bell", action="store_true", help="collect Bell-mode records instead of playing")
    p.add_argument("--round-timeout", type=float, default=5.0)
    p.add_argument("--log", help="write the per-round CSV log here")
    _common(p)

    p = sub.add_parser("player", help="run one player")
    p.add_argument("--referee", required=True, help="host:port")
    p.add_argument("--source", help="host:port (entangled strategy)")
    p.add_argument("--role", required=True, choices=["alice", "bob"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strategy", choices=["quantum", "classical"], default="quantum")
    p.add_argument("--bell", action="store_true", help="choose own settings each round")
    p.add_argument("--no-phase-correction", action="store_true")
    _common(p, rounds=False)

    p = sub.add_parser("source", help="run the entanglement source")
    p.add_argument("--endpoint", default="127.0.0.1:7701")
    p.add_argument("--n", type=int, required=True)
    _noise_args(p)
    _common(p, rounds=False)
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser, argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        command = next((a for a in argv if a in COMMANDS), None)
        if command is not None:
            sub = parser._subparsers._group_actions[0].choices[command]
            _config_defaults(sub, command, _read_config(known.config))
    return parser.parse_args(argv)


def _config_defaults(sub, command, values) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        action = actions.get(key)
        if action is None or key == "help":
            raise ValidationError(f"config key {key!r} is not an option of {command}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                defaults[key] = action.type(value) if action.type else value
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValidationError(f"config {key}: {exc}")
            if action.choices and defaults[key] not in action.choices:
                raise ValidationError(f"config {key}: {value!r} not in {sorted(action.choices)}")
        action.required = False
    sub.set_defaults(**defaults)


def _validate(args) -> None:
    def field(name, check):
        try:
            check()
        except (ValueError, GameSizeError) as exc:
            raise ValidationError(f"--{name}: {exc}")

    if getattr(args, "n", None) is not None:
        field("n", lambda: check_n(args.n))
    if getattr(args, "rounds", None) is not None and args.rounds < 0:
        raise ValidationError("--rounds: must be non-negative")
    if getattr(args, "seed", None) is not None:
        field("seed", lambda: seeding.check_seed(args.seed))
    v = getattr(args, "visibility", None)
    if v is not None and not 0.0 <= v <= 1.0:
        raise ValidationError(f"--visibility: must lie in [0, 1], got {v}")
    r = getattr(args, "target_ratio", None)
    if r is not None and not 0.0 < r <= 1.0:
        raise ValidationError(f"--target-ratio: must lie in (0, 1], got {r}")
    e = getattr(args, "readout_error", None)
    if e is not None and not 0.0 <= e < 0.5:
        raise ValidationError(f"--readout-error: must lie in [0, 0.5), got {e}")
    if r is not None and e:
        raise ValidationError("--target-ratio calibrates visibility with zero readout error; drop --readout-error")


def _noise(args, n: int) -> NoiseModel:
    if getattr(args, "target_ratio", None) is not None:
        try:
            return NoiseModel(visibility=calibrate_visibility(args.target_ratio, n))
        except ValueError as exc:
            raise ValidationError(f"--target-ratio: {exc}")
    vis = getattr(args, "visibility", None)
    return NoiseModel(1.0 if vis is None else vis, getattr(args, "readout_error", 0.0) or 0.0)


def _config(args, n=None, seed=None, strategy=None, transport=None) -> GameConfig:
    n = args.n if n is None else n
    return GameConfig(
        n=n,
        rounds=getattr(args, "rounds", 0),
        strategy=strategy or getattr(args, "strategy", "quantum"),
        noise=_noise(args, n),
        seed=args.seed if seed is None else seed,
        transport=transport or getattr(args, "transport", INPROC),
        correct_phase=not getattr(args, "no_phase_correction", False),
        round_timeout=getattr(args, "round_timeout", 5.0),
    )


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_round_log(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ROUND_LOG_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv() + "\n")


def _fmt(x) -> str:
    return "nan" if x is None else f"{x:.6f}"


def cmd_play(args) -> int:
    cfg = _config(args)
    stats, records = run_game(cfg)
    if args.log:
        _write_round_log(args.log, records)
    print(f"n={cfg.n} strategy={cfg.strategy} transport={cfg.transport} rounds={stats.total_rounds} "
          f"wins={stats.wins} incomplete={stats.incomplete}")
    if not stats.defined:
        print("omega_hat=undefined (no rounds played)")
        return 0
    print(f"omega_hat={stats.omega_hat:.6f} se={stats.std_error:.6f} "
          f"sigma_above_classical={stats.sigma_above_classical:.3f}")
    print(f"omega_c={omega_c(cfg.n):.6f} omega_q={omega_q(cfg.n):.6f}")
    for q, (count, won) in stats.per_query_table.items():
        print(f"  query {q} {q.kind.value:8s} count={count} wins={won}")
    return 2 if stats.aborted else 0


def cmd_sweep(args) -> int:
    strategies = ["quantum", "classical"] if args.strategy == "both" else [args.strategy]
    out, close = _open_out(args.out)
    try:
        out.write(SWEEP_HEADER + "\n")
        for n in args.n_range:
            for strategy in strategies:
                seed = seeding.derive_seed(args.seed, f"sweep/{n}/{strategy}")
                cfg = _config(args, n=n, seed=seed, strategy=strategy)
                stats, _ = run_game(cfg)
                if not stats.defined:
                    out.write(f"{n},{strategy},nan,nan,{omega_c(n):.6f},{omega_q(n):.6f},nan\n")
                    continue
                out.write(f"{n},{strategy},{stats.omega_hat:.6f},{stats.std_error:.6f},{omega_c(n):.6f},"
                          f"{omega_q(n):.6f},{stats.omega_hat / omega_q(n):.6f}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_bell(args) -> int:
    if args.log and len(args.n_range) != 1:
        raise ValidationError("--log needs a single n")
    rows = []
    for n in args.n_range:
        seed = seeding.derive_seed(args.seed, f"bell/{n}")
        cfg = _config(args, n=n, seed=seed, strategy="quantum")
        est = estimate_omega(run_bell_test(cfg, log_path=args.log))
        rows.append(est)
    out, close = _open_out(args.out)
    try:
        out.write(BELL_HEADER + "\n")
        for est in rows:
            out.write(f"{est.n},{est.omega_hat:.6f},{est.std_error:.6f},"
                      f"{nonlocal_content(est.omega_hat, est.n):.6f},{est.p_nl_error:.6f}\n")
    finally:
        if close:
            out.close()
    chsh = chsh_reference()
    footer = (f"# chsh_omega_c={chsh['omega_c']:.6f} chsh_omega_q={chsh['omega_q']:.6f} "
              f"chsh_pnl={chsh['pnl']:.6f}\n")
    sys.stdout.write(footer)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            for est in rows:
                fh.write(f"n={est.n}\nomega_hat={est.omega_hat:.9f}\nse={est.std_error:.9f}\n"
                         f"pnl_raw={est.p_nl_lower:.9f}\npnl={est.p_nl_clamped:.9f}\npnl_err={est.p_nl_error:.9f}\n")
            for key, value in chsh.items():
                fh.write(f"chsh_{key}={value:.9f}\n")
    return 0


def cmd_bounds(args) -> int:
    reports = []
    for n in args.n_range:
        computed = n <= COMPUTED_N_MAX
        reports.append((bounds_report(n) if computed else closed_form_report(n), computed))
    out, close = _open_out(args.out)
    try:
        out.write(BOUNDS_HEADER + "\n")
        for rep, _ in reports:
            out.write(rep.csv() + "\n")
    finally:
        if close:
            out.close()
    if args.out:
        print(f"{'n':>3} {'alpha':>5} {'theta':>11} {'alpha*':>7}  source")
        for rep, computed in reports:
            print(f"{rep.n:>3} {rep.alpha:>5} {rep.theta:>11.6f} {rep.alpha_star:>7.3f}  "
                  f"{'computed' if computed else 'closed form'}")
    return 0


def _announce(host, port):
    print(f"listening on {host}:{port}", flush=True)


def cmd_serve(args) -> int:
    from .protocol.net import serve_referee

    cfg = _config(args, transport=TCP)
    stats, records, aborted = serve_referee(args.endpoint, cfg, bell=args.bell, on_listening=_announce)
    if args.log:
        if args.bell:
            from .protocol.actors import BELL_LOG_HEADER

            with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(BELL_LOG_HEADER + "\n")
                for rec in records:
                    fh.write(rec.csv() + "\n")
        else:
            _write_round_log(args.log, records)
    incomplete = sum(not r.complete for r in records)
    print(f"rounds={len(records)} incomplete={incomplete} aborted={int(aborted)}")
    if stats is not None and stats.defined:
        print(f"omega_hat={stats.omega_hat:.6f} se={stats.std_error:.6f} "
              f"sigma_above_classical={stats.sigma_above_classical:.3f}")
    return 2 if aborted else 0


def cmd_player(args) -> int:
    from .protocol.net import connect_player

    cfg = _config(args, transport=TCP)
    connect_player(args.referee, args.source, args.role, cfg, bell=args.bell)
    return 0


def cmd_source(args) -> int:
    from .protocol.net import serve_source

    serve_source(args.endpoint, _config(args, transport=TCP), on_listening=_announce)
    return 0


COMMANDS = {
    "play": cmd_play,
    "sweep": cmd_sweep,
    "bell": cmd_bell,
    "bounds": cmd_bounds,
    "serve": cmd_serve,
    "player": cmd_player,
    "source": cmd_source,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        _validate(args)
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ProtocolError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    sys.exit(main())
