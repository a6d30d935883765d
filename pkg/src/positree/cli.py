"""Command-line workbench.

Subcommands: gen, prune, extract, density, adversary encode|decode,
force step, tt1, verify.  All numeric output is rendered as exact
dyadics (p/2^q), never floating point.  Exit codes: 0 success, 1
verification or precondition failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adversary import HaltingTable, adversarial_tree, decode_halting
from .certify import (
    adversary_decode_certificate,
    adversary_encode_certificate,
    canonical_json,
    coloring_from_record,
    condition_from_record,
    density_certificate,
    extract_certificate,
    force_step_certificate,
    gen_certificate,
    prune_certificate,
    tt1_certificate,
    verify_certificate,
)
from .clopen import ClopenTree
from .dyadic import Dyadic
from .errors import (
    EmptyAfterPruning,
    MalformedCertificate,
    MalformedInput,
    NoHomogeneousTree,
    PositreeError,
    UnknownVersion,
)
from .extract import extract_perfect
from .forcing import BUILTIN_FUNCTIONALS, Constant, Split, forcing_step, table_functional
from .kucera import prune
from .randomgen import GenSpec, gen_random_positive_tree


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_tree(path: str) -> ClopenTree:
    return ClopenTree.from_text(_read(path))


def _load_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _emit(args, cert: dict, lines: list[str]) -> None:
    if getattr(args, "cert", None):
        _write(args.cert, canonical_json(cert) + "\n")
    if args.json:
        print(canonical_json(cert))
    else:
        for line in lines:
            print(line)


def _cmd_gen(args) -> int:
    spec = GenSpec(depth=args.depth, target=Dyadic.parse(args.target), seed=args.seed)
    tree = gen_random_positive_tree(spec)
    if args.out:
        _write(args.out, tree.to_text())
    cert = gen_certificate(spec, tree)
    _emit(args, cert, [
        f"depth     {tree.depth}",
        f"leaves    {tree.leaf_count()}",
        f"measure   {tree.measure()}",
    ])
    return 0


def _cmd_prune(args) -> int:
    tree = _load_tree(getattr(args, "in"))
    eps = Dyadic.parse(args.epsilon)
    try:
        result, report = prune(tree, eps)
    except EmptyAfterPruning as exc:
        print(f"empty after pruning: removed {len(exc.report.events)} cylinders", file=sys.stderr)
        return 1
    if args.out:
        _write(args.out, result.to_text())
    cert = prune_certificate(tree, eps, result, report)
    _emit(args, cert, [
        f"input measure   {report.input_measure}",
        f"output measure  {report.output_measure}",
        f"pruned          {' '.join(report.pruned) if report.pruned else '(none)'}",
    ])
    return 0


def _cmd_extract(args) -> int:
    tree = _load_tree(getattr(args, "in"))
    eps = Dyadic.parse(args.epsilon)
    witness, data = extract_perfect(tree, eps)
    cert = extract_certificate(tree, eps, witness, data)
    lines = [
        f"schedule   {list(data.schedule.values)}",
        f"delta      {data.delta}",
        f"witness    {len(witness)} nodes, norm {witness.norm}",
    ] + [f"check {name:<24} {'pass' if ok else 'FAIL'}" for name, ok in data.checks.items()]
    _emit(args, cert, lines)
    return 0 if data.all_passed() else 1


def _cmd_density(args) -> int:
    tree = _load_tree(getattr(args, "in"))
    eps = Dyadic.parse(args.epsilon)
    if args.delta is not None:
        delta = Dyadic.parse(args.delta)
    else:
        delta = tree.measure().shift_down(1)  # half the measure
    cert = density_certificate(tree, eps, delta)
    payload = cert["payload"]
    _emit(args, cert, [
        f"greedy witness        {payload['greedy'] or '(root)'}",
        f"maximization witness  {payload['maximization'] or '(root)'}",
        f"n={payload['n']} k={payload['k']} level={payload['level']}",
    ])
    return 0


def _cmd_adversary(args) -> int:
    table = HaltingTable.from_record(_load_json(args.table))
    if args.mode == "encode":
        tree = adversarial_tree(table, args.depth)
        if args.out:
            _write(args.out, tree.to_text())
        cert = adversary_encode_certificate(table, args.depth, tree)
        _emit(args, cert, [
            f"depth    {tree.depth}",
            f"leaves   {tree.leaf_count()}",
            f"measure  {tree.measure()}",
        ])
        return 0
    decoded = decode_halting(args.sigma, args.count, table)
    cert = adversary_decode_certificate(table, args.sigma, args.count)
    lines = [
        f"e={e}  {'divergent' if t is None else f'halts at {t}'}"
        for e, t in enumerate(decoded.times)
    ]
    _emit(args, cert, lines)
    return 0


def _cmd_force(args) -> int:
    record = _load_json(args.condition)
    cond = condition_from_record(record)
    table_record = None
    if args.functional_file:
        table_record = _load_json(args.functional_file)
        phi = table_functional(table_record)
    else:
        if args.functional not in BUILTIN_FUNCTIONALS:
            print(f"unknown functional {args.functional!r}; built-ins: "
                  f"{', '.join(sorted(BUILTIN_FUNCTIONALS))}", file=sys.stderr)
            return 2
        phi = BUILTIN_FUNCTIONALS[args.functional]
    result = forcing_step(cond, phi, args.target, args.lmax)
    cert = force_step_certificate(cond, phi, args.target, args.lmax, result, table_record)
    if isinstance(result, Split):
        lines = [
            f"branch      split at input {result.input_index}",
            f"extension   {len(result.extension)} nodes, norm {result.extension.norm}",
        ]
    else:
        lines = [
            "branch      constant",
            f"stable tree measure {result.stable_tree.measure()}",
            f"proof depth {result.proof_depth}",
        ]
    _emit(args, cert, lines)
    return 0


def _cmd_tt1(args) -> int:
    coloring = coloring_from_record(_load_json(args.coloring))
    try:
        cert = tt1_certificate(coloring, args.k)
    except NoHomogeneousTree as exc:
        print(f"no homogeneous tree: {exc}", file=sys.stderr)
        return 1
    payload = cert["payload"]
    lines = [f"color {payload['color']}"] + [
        f"{node or '(root)':>8} -> {image or '(root)'}" for node, image in payload["embedding"]
    ]
    _emit(args, cert, lines)
    return 0


def _cmd_verify(args) -> int:
    cert = _load_json(getattr(args, "in"))
    ok = verify_certificate(cert)
    print("certificate OK" if ok else "certificate REJECTED")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="positree",
        description="Exact computation on positive-measure subtrees of Cantor space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cert=True):
        p.add_argument("--json", action="store_true", help="print the certificate as JSON")
        if cert:
            p.add_argument("--cert", metavar="FILE", help="write the certificate to FILE")

    p = sub.add_parser("gen", help="generate a seeded random positive tree")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--target", required=True, help="measure lower bound, e.g. 3/2^2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE", help="write the tree to FILE")
    common(p)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("prune", help="measure pruning with exact thresholds")
    p.add_argument("--in", required=True, metavar="FILE")
    p.add_argument("--epsilon", required=True, help="budget, e.g. 1/2^2")
    p.add_argument("--out", metavar="FILE")
    common(p)
    p.set_defaults(fn=_cmd_prune)

    p = sub.add_parser("extract", help="perfect-subtree extraction with certificate")
    p.add_argument("--in", required=True, metavar="FILE")
    p.add_argument("--epsilon", required=True)
    common(p)
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("density", help="density witness search, both routes")
    p.add_argument("--in", required=True, metavar="FILE")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--delta", help="measure lower bound; default half the measure")
    common(p)
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("adversary", help="halting-table tree coding")
    mode = p.add_subparsers(dest="mode", required=True)
    enc = mode.add_parser("encode", help="build the depth-d truncation of the coded class")
    enc.add_argument("--table", required=True, metavar="FILE")
    enc.add_argument("--depth", type=int, required=True)
    enc.add_argument("--out", metavar="FILE")
    common(enc)
    enc.set_defaults(fn=_cmd_adversary, mode="encode")
    dec = mode.add_parser("decode", help="recover the table from a class member")
    dec.add_argument("--table", required=True, metavar="FILE")
    dec.add_argument("--sigma", required=True, help="bit string with enough ones")
    dec.add_argument("--count", type=int, required=True, help="entries to decode")
    common(dec)
    dec.set_defaults(fn=_cmd_adversary, mode="decode")

    p = sub.add_parser("force", help="forcing machinery")
    step = p.add_subparsers(dest="mode", required=True)
    st = step.add_parser("step", help="one dichotomy step against a functional")
    st.add_argument("--condition", required=True, metavar="FILE")
    st.add_argument("--functional", default="zeros-probe",
                    help=f"built-in name ({', '.join(sorted(BUILTIN_FUNCTIONALS))})")
    st.add_argument("--functional-file", metavar="FILE", help="decision-table functional")
    st.add_argument("--target", required=True, help="finite target bit sequence")
    st.add_argument("--lmax", type=int, required=True)
    common(st)
    st.set_defaults(fn=_cmd_force)

    p = sub.add_parser("tt1", help="monochromatic perfect embedding for a finite coloring")
    p.add_argument("--coloring", required=True, metavar="FILE")
    p.add_argument("--k", type=int, required=True)
    common(p)
    p.set_defaults(fn=_cmd_tt1)

    p = sub.add_parser("verify", help="re-verify a certificate")
    p.add_argument("--in", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (MalformedInput, MalformedCertificate, UnknownVersion, json.JSONDecodeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return 2
    except (PositreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
