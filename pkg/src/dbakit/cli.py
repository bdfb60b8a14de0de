"""Command line front end: enumerate, verify, random."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import concepts as cc
from .concepts import SizeCapError
from .context import ContextFormatError, context_from_json, context_to_json, read_cxt, write_cxt
from .dba import (DbaFormatError, FiniteDba, InvalidDbaError, check_properties, classify_dba,
                  dba_from_json, dba_to_json, extend_pure_iso, identity_hom, pure_indices,
                  validate_dba)
from .export import to_dot
from .filters import locus_identity_failures
from .generate import DENSITY_RANGE, random_context, random_topology, rng_for
from .representation import (RepresentationCapError, TheoremReport, automorphisms, build_kpr_cts,
                             cached_pure_part, characterize_pure_part, clopen_identity_failures,
                             dba_digest, digest, finite_rep_atoms, functor_F_laws, functor_G_laws,
                             k_maps, rep_map_oo, rep_map_wille)
from .topology import (Cts, clopen_proto_dba, clopen_semi_dba, cts_from_json, cts_to_json,
                       enumerate_clopen_oo_protoconcepts, enumerate_clopen_oo_semiconcepts)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

KINDS = ("concept", "oo-concept", "semi", "proto", "oo-semi", "oo-proto")
SUITES = ("axioms", "representation", "stone-roundtrip", "duality", "all")
AUTOMORPHISM_LIMIT = 64  # carrier size above which only the identity is tried


class UsageError(Exception):
    pass


# input


def load_input(path: str):
    """Return a FormalContext, Cts or FiniteDba depending on the file's content."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    if p.suffix != ".json":
        return read_cxt(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from None
    if isinstance(data, dict) and "meet" in data:
        return dba_from_json(data)
    if isinstance(data, dict) and "context" in data:
        return cts_from_json(data)
    return context_from_json(data)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


# enumerate


def _pair_order(pairs, oo: bool) -> np.ndarray:
    ext = np.array([A for A, _ in pairs], dtype=object)
    inn = np.array([B for _, B in pairs], dtype=object)
    ext_sub = (ext[:, None] & ~ext[None, :]) == 0  # [i, j]: extent i ⊆ extent j
    inn_sub = (inn[:, None] & ~inn[None, :]) == 0
    if oo:
        return ext_sub.T & inn_sub.T
    return ext_sub & inn_sub.T


def cmd_enumerate(args) -> int:
    obj = load_input(args.input)
    if isinstance(obj, FiniteDba):
        raise UsageError("enumerate expects a context or a CTS, got a dBa")
    cts = obj if isinstance(obj, Cts) else None
    ctx = cts.context if cts else obj
    cc.check_cap(ctx, args.cap, args.force)
    kind = args.kind
    algebra = None
    listed = None
    if kind in ("oo-proto", "oo-semi") and cts is not None:
        if cts.is_ctscr:
            algebra = clopen_proto_dba(cts) if kind == "oo-proto" else clopen_semi_dba(cts)
        else:
            # the clopen pairs exist but are not closed under the operations
            listed = (enumerate_clopen_oo_protoconcepts if kind == "oo-proto"
                      else enumerate_clopen_oo_semiconcepts)(cts)
    elif kind == "oo-proto":
        algebra = cc.build_proto_dba(ctx, args.cap, args.force)
    elif kind == "oo-semi":
        algebra = cc.build_semi_dba(ctx, args.cap, args.force)
    elif kind == "proto":
        algebra = cc.build_wille_proto_dba(ctx, args.cap, args.force)
    elif kind == "semi":
        algebra = cc.build_wille_semi_dba(ctx, args.cap, args.force)
    if algebra is not None:
        pairs = list(algebra.pairs)
        body = {"kind": kind, "context": context_to_json(ctx), "size": algebra.n,
                "classification": classify_dba(algebra)._asdict(), **algebra.to_json()}
        leq = algebra.leq
    else:
        if listed is None:
            listed = (cc.concept_keys if kind == "concept" else cc.oo_concept_keys)(ctx, args.cap, args.force)
        pairs = list(listed)
        body = {"kind": kind, "context": context_to_json(ctx), "size": len(pairs),
                "elements": [{"extent": ctx.object_names(A), "intent": ctx.attribute_names(B)}
                             for A, B in pairs]}
        leq = _pair_order(pairs, kind.startswith("oo")) if pairs else np.zeros((0, 0), bool)
    if cts is not None:
        body["topologies"] = {k: v for k, v in cts_to_json(cts).items() if k != "context"}
    labels = [cc.pair_label(ctx, A, B) for A, B in pairs]
    dot = to_dot(leq, labels, ctx.name or kind) if args.dot else None
    if args.out:
        _write(_dumps(body), args.out)
        if dot is not None:
            _write(dot, str(Path(args.out).with_suffix(".dot")))
    elif dot is not None:
        _write(dot, None)
    else:
        _write(_dumps(body), None)
    return EXIT_OK


# verify


def _dba_for(obj, algebra: str, cap, force) -> FiniteDba:
    if isinstance(obj, FiniteDba):
        return obj
    ctx = obj.context if isinstance(obj, Cts) else obj
    builders = {"proto": cc.build_proto_dba, "semi": cc.build_semi_dba}
    return builders[algebra](ctx, cap, force)


def suite_axioms(d: FiniteDba) -> list[TheoremReport]:
    report = validate_dba(d)
    out = [TheoremReport("axioms", report.ok, _first(report.violations), {}, dba_digest(d))]
    if report.ok:
        derived = report.derived_violations
        out.append(TheoremReport("derived-identities", report.derived_ok, _first(derived), {}, dba_digest(d)))
        props = check_properties(d)
        out.append(TheoremReport("order-properties", not props, _first(props), {}, dba_digest(d)))
        try:
            cls = classify_dba(d)
            out.append(TheoremReport("classification", True, None, cls._asdict(), dba_digest(d)))
        except InvalidDbaError as exc:
            out.append(TheoremReport("classification", False, {"check": "classification", "witness": str(exc)},
                                     {}, dba_digest(d)))
    return out


def _first(violations: dict):
    for name, wit in violations.items():
        if wit:
            return {"check": name, "witness": [list(map(int, w)) if isinstance(w, tuple) else w
                                               for w in wit[:1]]}
    return None


def suite_representation(d: FiniteDba) -> list[TheoremReport]:
    reps = [rep_map_oo(d).report, rep_map_wille(d).report, finite_rep_atoms(d).report,
            characterize_pure_part(d)]
    locus = locus_identity_failures(d)
    reps.append(TheoremReport("locus-identities", not locus, _first(locus), {}, dba_digest(d)))
    clopen = clopen_identity_failures(d)
    reps.append(TheoremReport("clopen-identities", not clopen, _first(clopen), {}, dba_digest(d)))
    return reps


def suite_stone(obj, discrete: bool) -> list[TheoremReport]:
    if isinstance(obj, FiniteDba):
        stone = build_kpr_cts(obj)
    elif isinstance(obj, Cts):
        stone = Cts.discrete(obj.context) if discrete else obj
    else:
        stone = Cts.discrete(obj)
    if not stone.is_stone:
        return [TheoremReport("stone-roundtrip", False, {"check": "stone-context", "witness": None},
                              {}, digest(cts_to_json(stone)))]
    rep = k_maps(stone).report
    rep.input = digest(cts_to_json(stone))
    return [rep]


def suite_duality(d: FiniteDba) -> list[TheoremReport]:
    cls = classify_dba(d)
    auts = automorphisms(d, limit=8) if d.n <= AUTOMORPHISM_LIMIT else [identity_hom(d)]
    pairs = [(f, g) for f in auts for g in auts]
    out = []
    if cls.fully_contextual:
        out.append(functor_G_laws(auts, pairs))
        p = cached_pure_part(d)
        pi = pure_indices(d)
        p_auts = automorphisms(p, limit=8) if p.n <= AUTOMORPHISM_LIMIT else []
        bad = []
        for k, h in enumerate(p_auts):
            f = extend_pure_iso(d, d, {int(pi[i]): int(pi[j]) for i, j in enumerate(h.map)})
            if not f.isomorphism or any(f.map[int(pi[i])] != int(pi[j]) for i, j in enumerate(h.map)):
                bad.append(k)
        out.append(TheoremReport("pure-extension", not bad, {"check": "extension", "witness": bad[:1]} if bad else None,
                                 {"automorphisms": len(p_auts)}, dba_digest(d)))
    if cls.pure:
        out.append(functor_F_laws(auts, pairs))
    for r in out:
        r.input = r.input or dba_digest(d)
    return out


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    obj = load_input(args.input)
    suites = SUITES[:-1] if args.suite == "all" else (args.suite,)
    reports: list[TheoremReport] = []
    d = None
    checked = not isinstance(obj, FiniteDba)  # algebras built from a context need no axiom gate
    for suite in suites:
        t0 = time.perf_counter()
        if suite == "stone-roundtrip":
            batch = suite_stone(obj, args.discrete)
        else:
            if d is None:
                d = _dba_for(obj, args.algebra, args.cap, args.force)
            if suite == "axioms":
                batch = suite_axioms(d)
                checked = checked or batch[0].verdict
            elif not checked and not validate_dba(d, derived=False).ok:
                batch = [TheoremReport(suite, False, {"check": "axioms", "witness": None}, {}, dba_digest(d))]
            elif suite == "representation":
                checked = True
                batch = suite_representation(d)
            else:
                checked = True
                batch = suite_duality(d)
        elapsed = int((time.perf_counter() - t0) * 1000) if args.timings else 0
        for r in batch:
            r.elapsed_ms = elapsed
        reports.extend(batch)
    verdict = all(r.verdict for r in reports)
    body = {"suite": args.suite, "input": Path(args.input).name, "verdict": verdict,
            "reports": [r.to_json() for r in reports]}
    _write(_dumps(body), args.out)
    return EXIT_OK if verdict else EXIT_FAIL


# random


def cmd_random(args) -> int:
    rng = rng_for(args.seed)
    out = Path(args.out) if args.out else None
    docs = []
    for i in range(args.count):
        g = args.objects if args.objects else int(rng.integers(1, 5))
        m = args.attributes if args.attributes else int(rng.integers(1, 5))
        density = float(rng.uniform(*DENSITY_RANGE))
        ctx = random_context(rng, g, m, density, name=f"seed{args.seed}-{i}")
        entry = {"seed": args.seed, "index": i, "density": round(density, 6), "context": context_to_json(ctx)}
        if args.topology:
            cts = Cts(ctx, random_topology(rng, g), random_topology(rng, m))
            entry.update({k: v for k, v in cts_to_json(cts).items() if k != "context"})
        if args.algebra:
            builder = cc.build_proto_dba if args.algebra == "proto" else cc.build_semi_dba
            entry["dba"] = dba_to_json(builder(ctx))
        docs.append((ctx, entry))
    if out is not None and out.suffix == ".cxt":
        if len(docs) != 1:
            raise UsageError(".cxt output holds a single context; use --count 1 or a .json path")
        out.write_text(write_cxt(docs[0][0]))
    else:
        _write(_dumps({"seed": args.seed, "instances": [e for _, e in docs]}), args.out)
    return EXIT_OK


# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cap", type=int, default=None, help="log2 bound on 2^|G|·2^|M|")
        p.add_argument("--force", action="store_true", help="allow --cap above the default")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("enumerate", help="enumerate pairs of a context or CTS")
    p.add_argument("input")
    p.add_argument("--kind", choices=KINDS, default="oo-proto")
    p.add_argument("--dot", action="store_true", help="emit the Hasse diagram in DOT")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run a theorem suite")
    p.add_argument("input")
    p.add_argument("--suite", default="all")
    p.add_argument("--algebra", choices=("proto", "semi"), default="proto",
                   help="algebra built from a context input")
    p.add_argument("--discrete", action="store_true", help="treat both sides as discrete")
    p.add_argument("--timings", action="store_true", help="record elapsed times")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", help="generate seeded random contexts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--objects", type=int, default=0)
    p.add_argument("--attributes", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--topology", action="store_true", help="attach random topologies")
    p.add_argument("--algebra", choices=("proto", "semi"), default=None)
    common(p)
    p.set_defaults(func=cmd_random)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is not None and args.cap > cc.DEFAULT_CAP and not args.force:
        parser.error(f"--cap above {cc.DEFAULT_CAP} requires --force")
    try:
        return args.func(args)
    except (SizeCapError, RepresentationCapError) as exc:
        print(f"dbakit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ContextFormatError, DbaFormatError, ValueError) as exc:
        print(f"dbakit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
