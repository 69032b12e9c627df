"""Command line front end.

Three subcommands:

* enumerate — run a counting engine (or simulate an arbitrary container
  basis) and print one count per line; optionally cross-check a prefix
  against the exhaustive oracle.

* guess — fit an algebraic or differential relation to a sequence read
  from a file or produced by an engine.

* bijection — replay generation skeletons from one container machine on
  another and check that the transport is a bijection between the two
  generated classes (optionally that it preserves left-to-right maxima).

Exit codes: 0 success, 2 usage error, 3 bad data or infeasible request,
4 a mathematical mismatch (cross-check or bijection failure) — scripts can
tell "you called it wrong" from "the counts genuinely disagree".
"""

from __future__ import annotations

import argparse
import json
import sys

from . import engines, guess, machine, perms

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MISMATCH = 4

# engine runs at least this long get a checkpoint file unless told otherwise
CHECKPOINT_AUTO_MIN = 500


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="avmachine",
        description="container machines for permutation classes: exact "
        "counting, relation guessing, and skeleton-transport bijections",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser(
        "enumerate",
        help="count the permutation class a container machine generates",
    )
    src = pe.add_mutually_exclusive_group(required=True)
    src.add_argument(
        "--engine",
        choices=sorted(engines.ENGINES),
        help="one of the built-in counting engines",
    )
    src.add_argument(
        "--basis",
        metavar="FILE",
        help='simulate the machine whose container basis is in FILE, a JSON '
        'object {"basis": ["3 1 2", ...]}',
    )
    pe.add_argument("--n", type=int, required=True, help="largest size to count")
    pe.add_argument(
        "--method",
        choices=["auto", "exact", "modular"],
        default="auto",
        help="engine backend (default auto)",
    )
    pe.add_argument(
        "--cross-check",
        type=int,
        metavar="M",
        help="also enumerate sizes 0..M exhaustively and compare",
    )
    pe.add_argument(
        "--checkpoint",
        metavar="FILE",
        help="checkpoint file for resumable long runs "
        f"(default: auto for --engine runs with --n >= {CHECKPOINT_AUTO_MIN})",
    )
    pe.add_argument(
        "--no-checkpoint",
        action="store_true",
        help="disable the automatic checkpoint",
    )
    pe.add_argument(
        "--json", action="store_true", help="print a JSON array of decimal strings"
    )

    pg = sub.add_parser(
        "guess", help="fit an exact algebraic or differential relation"
    )
    src = pg.add_mutually_exclusive_group(required=True)
    src.add_argument(
        "--terms",
        metavar="FILE",
        help="sequence file: one decimal per line, or a JSON array",
    )
    src.add_argument(
        "--engine",
        choices=sorted(engines.ENGINES),
        help="generate the sequence with an engine (needs --n)",
    )
    pg.add_argument("--n", type=int, help="terms to generate with --engine")
    kind = pg.add_mutually_exclusive_group(required=True)
    kind.add_argument(
        "--algebraic",
        nargs=2,
        type=int,
        metavar=("DX", "DF"),
        help="search for P(x, f) = 0 with deg_x <= DX, deg_f <= DF",
    )
    kind.add_argument(
        "--ade",
        nargs=2,
        type=int,
        metavar=("K", "D"),
        help="search for a differential relation of order K, total degree D",
    )
    pg.add_argument(
        "--egf",
        action="store_true",
        help="fit the exponential generating function (with --ade)",
    )
    pg.add_argument("--json", action="store_true", help="machine-readable output")

    pb = sub.add_parser(
        "bijection",
        help="transport generated permutations between two container machines",
    )
    pb.add_argument(
        "--from",
        dest="basis_from",
        required=True,
        metavar="PATTERNS",
        help="source container basis, comma-separated (e.g. '12' or '312,213')",
    )
    pb.add_argument(
        "--to",
        dest="basis_to",
        required=True,
        metavar="PATTERNS",
        help="target container basis",
    )
    pb.add_argument(
        "--perm",
        metavar="PERM",
        help="transport this single permutation and print the image",
    )
    pb.add_argument(
        "--n", type=int, help="check all generated permutations of sizes 0..N"
    )
    pb.add_argument(
        "--check-lrmax",
        action="store_true",
        help="also require left-to-right maxima (positions and values) to agree",
    )
    return p


# --- enumerate --------------------------------------------------------------


def _resolve_checkpoint(args) -> str | None:
    if args.no_checkpoint:
        return None
    if args.checkpoint:
        return args.checkpoint
    if args.engine and args.n >= CHECKPOINT_AUTO_MIN:
        return f"{args.engine}-n{args.n}.checkpoint.json"
    return None


def _cmd_enumerate(args) -> int:
    if args.n < 0:
        print("enumerate: --n must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    if args.engine:
        ckpt = _resolve_checkpoint(args)
        if ckpt:
            print(f"checkpointing to {ckpt}", file=sys.stderr)
        counts = engines.engine_counts(
            args.engine, args.n, method=args.method, checkpoint=ckpt
        )
        gen_basis = engines.ENGINE_GENERATED_BASIS[args.engine]
    else:
        with open(args.basis) as fh:
            basis = machine.basis_from_spec_json(fh.read())
        counts = machine.machine_class_counts(basis, args.n)
        gen_basis = perms.one_skew_basis(basis)
    if args.cross_check is not None:
        m = min(args.cross_check, args.n)
        oracle, _ = perms.enumerate_av(
            gen_basis, m, max_guard=m, return_perms=True
        )
        for i in range(m + 1):
            if counts[i] != oracle[i]:
                print(
                    f"mismatch at n={i}: engine {counts[i]} vs exhaustive "
                    f"{oracle[i]}",
                    file=sys.stderr,
                )
                return EXIT_MISMATCH
        print(f"cross-check ok through n={m}", file=sys.stderr)
    if args.json:
        print(json.dumps([str(c) for c in counts]))
    else:
        for c in counts:
            print(c)
    return EXIT_OK


# --- guess ----------------------------------------------------------------


def _read_terms(path: str) -> list[int]:
    with open(path) as fh:
        text = fh.read().strip()
    if not text:
        raise ValueError(f"{path}: empty sequence file")
    if text.startswith("["):
        data = json.loads(text)
        return [int(v) for v in data]
    return [
        int(line)
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]


def _cmd_guess(args) -> int:
    if args.engine:
        if args.n is None:
            print("guess: --engine needs --n", file=sys.stderr)
            return EXIT_USAGE
        seq = engines.engine_counts(args.engine, args.n)
    else:
        seq = _read_terms(args.terms)
    if args.egf and not args.ade:
        print("guess: --egf only applies to --ade", file=sys.stderr)
        return EXIT_USAGE
    if args.algebraic:
        dx, df = args.algebraic
        rel = guess.guess_algebraic(seq, dx, df)
        bounds = f"d_x={dx}, d_f={df}"
    else:
        k, d = args.ade
        rel = guess.guess_ade(seq, k, d, egf=args.egf)
        bounds = f"order k={k}, degree d={d}" + (", egf" if args.egf else "")
    if rel is None:
        if args.json:
            print(json.dumps({"found": False, "bounds": bounds, "terms": len(seq)}))
        else:
            print(
                f"no relation within bounds ({bounds}) using {len(seq)} terms"
            )
        return EXIT_OK
    if args.json:
        print(rel.as_json())
    else:
        print(rel)
        print(rel.as_json())
    return EXIT_OK


# --- bijection --------------------------------------------------------------


def _parse_basis_arg(text: str) -> tuple:
    return perms.normalize_basis(
        perms.parse_permutation(tok) for tok in text.split(",") if tok.strip()
    )


def _cmd_bijection(args) -> int:
    b_from = _parse_basis_arg(args.basis_from)
    b_to = _parse_basis_arg(args.basis_to)
    if args.perm is not None:
        pi = perms.parse_permutation(args.perm)
        sigma = machine.transport(pi, b_from, b_to)
        if sigma is None:
            print(
                "transport is ambiguous for this permutation (some push has "
                "several legal slots on the target machine)",
                file=sys.stderr,
            )
            return EXIT_MISMATCH
        print(perms.format_permutation(sigma))
        return EXIT_OK
    if args.n is None:
        print("bijection: need --perm or --n", file=sys.stderr)
        return EXIT_USAGE
    gen_from = perms.one_skew_basis(b_from)
    gen_to = perms.one_skew_basis(b_to)
    _, levels = perms.enumerate_av(
        gen_from, args.n, max_guard=args.n, return_perms=True
    )
    counts_to = perms.enumerate_av(gen_to, args.n, max_guard=args.n)
    for m, members in enumerate(levels):
        if len(members) != counts_to[m]:
            print(
                f"n={m}: source class has {len(members)} members but target "
                f"class has {counts_to[m]} — no bijection is possible",
                file=sys.stderr,
            )
            return EXIT_MISMATCH
        images = []
        for pi in members:
            sigma = machine.transport(pi, b_from, b_to)
            if sigma is None:
                print(
                    f"n={m}: transport ambiguous for {perms.format_permutation(pi)}",
                    file=sys.stderr,
                )
                return EXIT_MISMATCH
            if not perms.avoids_all(sigma, gen_to):
                print(
                    f"n={m}: image {perms.format_permutation(sigma)} of "
                    f"{perms.format_permutation(pi)} lies outside the target class",
                    file=sys.stderr,
                )
                return EXIT_MISMATCH
            if args.check_lrmax and perms.left_to_right_maxima(
                pi
            ) != perms.left_to_right_maxima(sigma):
                print(
                    f"n={m}: left-to-right maxima differ for "
                    f"{perms.format_permutation(pi)}",
                    file=sys.stderr,
                )
                return EXIT_MISMATCH
            images.append(sigma)
        if len(set(images)) != len(members):
            print(f"n={m}: transport is not injective", file=sys.stderr)
            return EXIT_MISMATCH
        note = ", left-to-right maxima preserved" if args.check_lrmax else ""
        print(f"n={m}: {len(members)} permutations, bijection ok{note}")
    return EXIT_OK


# --- entry ------------------------------------------------------------------


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "enumerate": _cmd_enumerate,
        "guess": _cmd_guess,
        "bijection": _cmd_bijection,
    }[args.command]
    try:
        return handler(args)
    except (
        OSError,
        ValueError,
        json.JSONDecodeError,
        guess.InsufficientTerms,
        machine.MachineError,
        machine.MachineBudgetError,
    ) as exc:
        print(f"avmachine {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
