"""Command line front end.

Exit codes: 0 success, 2 parse or precondition error, 3 enumeration cap
exceeded, 4 a verification failed (for ``witness`` the certificate is still
written), 5 a certificate is tampered or does not reproduce.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .certificate import CertificateError, _elem, build_certificate, verify_certificate
from .fingroup import CapExceeded
from .pipeline import PipelineError, centerless_quotient, check_birman_identity, ensure_noncyclic, q_level
from .semidirect import serialize_linbyfin
from .specfile import SpecError, override, parse_spec

OK, PARSE_ERROR, CAP_EXCEEDED, FAILED, TAMPERED = 0, 2, 3, 4, 5


def _report(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for ln in lines:
            print(ln)


def _load_spec(args):
    text = Path(args.spec).read_text()
    sf = parse_spec(text)
    return override(sf, ell=getattr(args, "ell", None), cap=getattr(args, "cap", None),
                    seed=getattr(args, "seed", None), **{"orbit-cap": getattr(args, "orbit_cap", None)})


def cmd_witness(args) -> int:
    sf = _load_spec(args)
    cert, result = build_certificate(sf.text)
    Path(args.out).write_text(cert)
    if args.emit_intermediate:
        dump = {
            "orbit": [[_elem(x, sf.ell) for x in h.images] for h in result.orbit.members],
            "Q": serialize_linbyfin(result.diag.Q),
        }
        if result.centerless is not None:
            dump["R"] = serialize_linbyfin(result.centerless.R)
            dump["S"] = serialize_linbyfin(result.centerless.S)
        Path(str(args.out) + ".intermediate.json").write_text(json.dumps(dump, sort_keys=True, default=repr))
    status = "VALID" if result.valid else "INVALID"
    lines = [f"{k}: {'ok' if v else 'FAILED'}" for k, v in result.flags.items()]
    lines.append(f"certificate {status} -> {args.out}")
    _report(args, {"status": status, "flags": result.flags, "details": result.details, "out": str(args.out)}, lines)
    return OK if result.valid else FAILED


def cmd_centerless(args) -> int:
    sf = _load_spec(args)
    opts = sf.pipeline_options()
    spec = ensure_noncyclic(sf.quotient_spec(), opts.cap)
    res = centerless_quotient(spec, opts.cap, opts.seed, strict=False)
    info = {
        "noncyclic_replaced": spec.origin is not None,
        "R_order": res.R.order_str(),
        "S_order": res.S.order_str(),
        "C_order": res.c_order,
        "P_ell_order": res.P_ell.order_str(),
        "center_order": res.center_order,
        "centerless": res.centerless,
        "factor_chain": res.chain_ok,
    }
    _report(args, info, [f"{k}: {v}" for k, v in info.items()])
    return OK if res.centerless and res.chain_ok else FAILED


def cmd_birman(args) -> int:
    sf = _load_spec(args)
    opts = sf.pipeline_options()
    spec = sf.quotient_spec()
    L = q_level(spec, opts)
    rep = check_birman_identity(spec.n, L.diag, L.p0, sign=args.sign, all_conjugators=args.all_conjugators)
    info = {
        "orbit_size": len(L.orbit),
        "Q_order": L.diag.Q.order_str(),
        "P0_order": L.p0.P0.order_str(),
        "per_generator": rep.per_generator,
        "conjugators_checked": rep.conjugator_count,
        "conjugators_consistent": rep.consistent,
        "holds": rep.holds,
    }
    lines = [f"Push(g{j}): {'ok' if ok else 'FAILED'}" for j, ok in enumerate(rep.per_generator, 1)]
    if args.all_conjugators:
        lines.append(f"all {rep.conjugator_count} conjugators agree: {rep.consistent}")
    _report(args, info, lines)
    ok = rep.holds and (rep.consistent or not args.all_conjugators)
    return OK if ok else FAILED


def cmd_verify(args) -> int:
    text = Path(args.cert).read_text()
    try:
        authentic, valid, bad = verify_certificate(text)
    except CertificateError as e:
        _report(args, {"authentic": False, "error": str(e)}, [f"certificate rejected: {e}"])
        return TAMPERED
    info = {"authentic": authentic, "valid": valid, "mismatched": bad}
    if not authentic:
        _report(args, info, [f"certificate does not reproduce; mismatched: {', '.join(bad)}"])
        return TAMPERED
    _report(args, info, [f"certificate reproduces; status {'VALID' if valid else 'INVALID'}"])
    return OK if valid else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="braidcsp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"braidcsp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("spec", help="quotient spec file")
            p.add_argument("--cap", type=int, help="enumeration cap")
            p.add_argument("--seed", type=int, help="seed for randomized checks")
            p.add_argument("--ell", type=int, help="override the prime")
            p.add_argument("--orbit-cap", type=int, help="cap on the automorphism orbit")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("witness", help="run the full pipeline and write a certificate")
    common(p)
    p.add_argument("-o", "--out", required=True, help="certificate path")
    p.add_argument("--emit-intermediate", action="store_true", help="also dump orbit and LinByFin data")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("centerless", help="build the centerless quotient and check it")
    common(p)
    p.set_defaults(func=cmd_centerless)

    p = sub.add_parser("birman", help="check the finite Birman identity for every push generator")
    common(p)
    p.add_argument("--sign", type=int, choices=(-1, 1), default=-1, help="push convention")
    p.add_argument("--all-conjugators", action="store_true", help="require every normalizing conjugator to agree")
    p.set_defaults(func=cmd_birman)

    p = sub.add_parser("verify", help="recompute a certificate from its embedded spec")
    p.add_argument("cert", help="certificate path")
    common(p, spec=False)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, PipelineError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return PARSE_ERROR
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return CAP_EXCEEDED


if __name__ == "__main__":
    sys.exit(main())
