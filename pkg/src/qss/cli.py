"""Command-line front end: honest runs, shot-count simulation presets,
attack scenarios, and parameter sweeps. All outputs are deterministic for a
fixed seed; JSON files are written with sorted keys so reruns are
byte-identical.

Exit codes: 0 success/accepted, 1 protocol abort, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter

import numpy as np

from . import __version__
from .adversary import ATTACK_KINDS, AttackSpec, run_attack, run_shot_series
from .dealer import DealerConfig, choose_modulus
from .errors import PresetInfeasible, QssError
from .field import is_prime
from .protocol import instance_from_deal

PRESET_PLAYERS = (3, 4, 15)
MAX_PRESET_QUBITS = 3


def resolve_preset(n: int, c: int) -> tuple[int, int, bool]:
    """Map a (players, qubits) preset to a concrete modulus.

    Picks the largest prime that needs exactly c qubits and exceeds n. When
    that fails, falls back to the dealer's default modulus provided it still
    fits in the preset family's 3-qubit envelope; otherwise the preset is
    infeasible. Returns (d, resolved c, fallback flag).
    """
    lo, hi = 2 ** (c - 1), 2**c
    for p in range(hi, lo, -1):
        if p > n and is_prime(p):
            return p, c, False
    d = choose_modulus(n).d
    c_fb = (d - 1).bit_length()
    if c_fb > MAX_PRESET_QUBITS:
        raise PresetInfeasible(
            f"no prime above {n} players fits in {MAX_PRESET_QUBITS} qubits "
            f"(requested c={c})"
        )
    return d, c_fb, True


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(args: argparse.Namespace, **body) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {"version": __version__, "config": config, "seed": args.seed, **body}


def _require_json(args: argparse.Namespace) -> None:
    if getattr(args, "format", "json") != "json":
        raise QssError(f"{args.command} only supports --format json")


def cmd_run(args: argparse.Namespace) -> int:
    _require_json(args)
    config = DealerConfig(
        n=args.n, t=args.t, secret=args.secret, rng_seed=args.seed, d_override=args.d
    )
    instance = instance_from_deal(config)
    transcript = instance.run(seed=args.seed)
    _emit(_envelope(args, transcript=transcript.to_json()), args.out)
    return 0 if transcript.accepted else 1


def cmd_simulate(args: argparse.Namespace) -> int:
    _require_json(args)
    if args.preset is not None:
        n = int(args.preset.split("-", 1)[1])
        d, c, fallback = resolve_preset(n, args.c)
        t = n
    else:
        if args.n is None or args.t is None or args.d is None:
            raise QssError("explicit simulation needs --n, --t and --d")
        n, t, d = args.n, args.t, args.d
        c, fallback = (d - 1).bit_length(), False
    secret = args.secret % d
    config = DealerConfig(n=n, t=t, secret=secret, rng_seed=args.seed, d_override=d)
    instance = instance_from_deal(config)
    transcripts = run_shot_series(instance, args.shots, args.seed)
    histogram = Counter(tr.f0 for tr in transcripts)
    expected = instance.expected_value("secret")
    payload = _envelope(
        args,
        resolved={"n": n, "t": t, "d": d, "c": c, "fallback": fallback, "secret": secret},
        shots=args.shots,
        histogram={str(k): v for k, v in sorted(histogram.items(), key=lambda kv: str(kv[0]))},
        expected=expected,
        all_correct=all(tr.accepted and tr.f0 == expected for tr in transcripts),
        ancilla_all_zero=all(all(a == 0 for a in tr.ancilla) for tr in transcripts),
    )
    _emit(payload, args.out)
    return 0 if payload["all_correct"] else 1


def cmd_attack(args: argparse.Namespace) -> int:
    _require_json(args)
    config = DealerConfig(
        n=args.n, t=args.t, secret=args.secret, rng_seed=args.seed, d_override=args.d
    )
    instance = instance_from_deal(config)
    spec = AttackSpec(
        kind=args.attack,
        hop_index=args.hop,
        player_id=args.player,
        shots=args.shots,
        seed=args.seed,
        hypotheses=tuple(args.hypotheses) if args.hypotheses else None,
        escalate=args.escalate,
    )
    report = run_attack(instance, spec)
    _emit(_envelope(args, report=report.to_json()), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = []
    primes = [p for p in range(2, args.d_max + 1) if is_prime(p)]
    cells = [
        (d, t, n)
        for d in primes
        for t in range(1, args.t_max + 1)
        for n in range(t, args.n_max + 1)
        if n < d
    ]
    children = np.random.SeedSequence(args.seed).spawn(len(cells)) if cells else []
    for (d, t, n), child in zip(cells, children):
        cell_seed = int(child.generate_state(1, dtype=np.uint64)[0])
        rng = np.random.default_rng(cell_seed)
        secret = int(rng.integers(d))
        config = DealerConfig(n=n, t=t, secret=secret, rng_seed=cell_seed, d_override=d)
        instance = instance_from_deal(config)
        transcript = instance.run(rng=rng)
        rows.append(
            {
                "d": d,
                "t": t,
                "n": n,
                "seed": cell_seed,
                "verdict": transcript.verdict,
                "f0": transcript.f0,
                "expected": instance.expected_value("secret"),
                "correct": transcript.f0 == secret and transcript.accepted,
            }
        )
    if args.format == "json":
        _emit(_envelope(args, rows=rows), args.out)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=["d", "t", "n", "seed", "verdict", "f0", "expected", "correct"]
        )
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0 if all(r["correct"] for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qss",
        description="Threshold d-level quantum secret sharing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="deal and run one reconstruction")
    run_p.add_argument("--n", type=int, required=True, help="number of players")
    run_p.add_argument("--t", type=int, required=True, help="threshold")
    run_p.add_argument("--secret", type=int, required=True)
    run_p.add_argument("--d", type=int, default=None, help="pin the prime modulus")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    run_p.add_argument("--format", choices=("json", "csv"), default="json")
    run_p.set_defaults(func=cmd_run)

    sim_p = sub.add_parser("simulate", help="shot-count experiment presets")
    sim_p.add_argument(
        "--preset", choices=[f"players-{n}" for n in PRESET_PLAYERS], default=None
    )
    sim_p.add_argument("--c", type=int, choices=(1, 2, 3), default=3, help="register width in qubits")
    sim_p.add_argument("--n", type=int, default=None)
    sim_p.add_argument("--t", type=int, default=None)
    sim_p.add_argument("--d", type=int, default=None)
    sim_p.add_argument("--secret", type=int, default=1)
    sim_p.add_argument("--shots", type=int, default=8192)
    sim_p.add_argument("--seed", type=int, default=0)
    sim_p.add_argument("--out", default=None)
    sim_p.add_argument("--format", choices=("json", "csv"), default="json")
    sim_p.set_defaults(func=cmd_simulate)

    atk_p = sub.add_parser("attack", help="run an attack scenario")
    atk_p.add_argument("--attack", choices=ATTACK_KINDS, required=True)
    atk_p.add_argument("--n", type=int, required=True)
    atk_p.add_argument("--t", type=int, required=True)
    atk_p.add_argument("--secret", type=int, default=1)
    atk_p.add_argument("--d", type=int, default=None)
    atk_p.add_argument("--hop", type=int, default=0, help="0-based hop to intercept")
    atk_p.add_argument("--player", type=int, default=None, help="target player position")
    atk_p.add_argument("--shots", type=int, default=8192)
    atk_p.add_argument("--seed", type=int, default=0)
    atk_p.add_argument(
        "--hypotheses", type=int, nargs=2, default=None,
        help="two shadow values to condition the leakage statistic on",
    )
    atk_p.add_argument("--escalate", action="store_true", help="colluders disturb the ring")
    atk_p.add_argument("--out", default=None)
    atk_p.add_argument("--format", choices=("json", "csv"), default="json")
    atk_p.set_defaults(func=cmd_attack)

    swp_p = sub.add_parser("sweep", help="cross product of (d, t, n) honest runs to CSV")
    swp_p.add_argument("--d-max", type=int, default=11)
    swp_p.add_argument("--t-max", type=int, default=4)
    swp_p.add_argument("--n-max", type=int, default=6)
    swp_p.add_argument("--seed", type=int, default=0)
    swp_p.add_argument("--out", default=None)
    swp_p.add_argument("--format", choices=("json", "csv"), default="csv")
    swp_p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QssError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
