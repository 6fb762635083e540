"""Witness certificates: deterministic, line-oriented, self-verifying text.

Each line is ``key <json>``; keys appear in a fixed order and JSON objects are
written with sorted keys, so equal results give byte-identical files. The
last line is a sha256 digest over everything before it. The full spec text
is embedded, so a certificate can be re-checked with no side files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from typing import Optional

import numpy as np

from . import __version__
from .fingroup import format_cycles
from .pipeline import WitnessResult, run_witness
from .semidirect import SDElem, serialize_linbyfin, serialize_vector
from .specfile import SpecError, parse_spec
from .words import format_word, sphere_group

CERT_HEADER = "braidcsp-certificate"
CERT_VERSION = 1
KEYS = (
    "tool", "seed", "spec-sha256", "spec", "options", "aut-gens", "status", "failing",
    "flags", "details", "phi", "orbit", "q", "p0", "pi-phi",
)


class CertificateError(ValueError):
    """Malformed or tampered certificate."""


def _dumps(x) -> str:
    return json.dumps(x, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _fmt_base(g) -> object:
    if isinstance(g, tuple) and g and isinstance(g[0], tuple):
        return [_fmt_base(x) for x in g]
    if isinstance(g, tuple) and all(isinstance(i, int) for i in g):
        return format_cycles(g)
    return repr(g)


def _elem(x: SDElem, ell: int) -> dict:
    return {"g": _fmt_base(x.g), "v": serialize_vector(np.asarray(x.v), ell)}


def certificate_fields(spec_text: str, result: WitnessResult, opts) -> dict:
    ell = result.spec.ell
    dom = sphere_group(result.spec.n)
    gens_names = list(result.orbit.gen_names)
    flags = [[k, bool(v)] for k, v in result.flags.items()]
    q = result.diag.q
    p0d = result.p0
    return {
        "tool": f"braidcsp {__version__}",
        "seed": opts.seed,
        "spec-sha256": hashlib.sha256(spec_text.encode()).hexdigest(),
        "spec": spec_text,
        "options": asdict(opts),
        "aut-gens": gens_names,
        "status": "VALID" if result.valid else "INVALID",
        "failing": result.failing(),
        "flags": flags,
        "details": result.details,
        "phi": {
            format_word(g, dom.lambda_index): _elem(x, ell) for g, x in zip(dom.gens(), result.phi.phi.images)
        },
        "orbit": {
            "size": len(result.orbit),
            "modulo_conjugacy": result.orbit.modulo_conjugacy,
            "words": [[gens_names[k] for k in w] for w in result.orbit.words],
        },
        "q": {
            "images": [_elem(x, ell) for x in q.images],
            "image": serialize_linbyfin(result.diag.Q, _fmt_base),
        },
        "p0": {
            "lambda_image": _elem(p0d.lam_image, ell),
            "N_basis": [serialize_vector(b, ell) for b in p0d.N.basis()],
            "images": [_elem(x, ell) for x in p0d.p0.images],
            "order": p0d.P0.order_str(),
        },
        "pi-phi": {"block": 0, "images": [_fmt_base(x.g[0]) for x in p0d.p0.images]},
    }


def render_certificate(fields: dict) -> str:
    lines = [f"{CERT_HEADER} {CERT_VERSION}"]
    lines += [f"{k} {_dumps(fields[k])}" for k in KEYS]
    body = "\n".join(lines) + "\n"
    return body + f"digest {hashlib.sha256(body.encode()).hexdigest()}\n"


def build_certificate(spec_text: str) -> tuple[str, WitnessResult]:
    """Run the pipeline on ``spec_text`` and render its certificate."""
    sf = parse_spec(spec_text)
    opts = sf.pipeline_options()
    result = run_witness(sf.quotient_spec(), opts)
    return render_certificate(certificate_fields(spec_text, result, opts)), result


def parse_certificate(text: str) -> dict:
    """Decode and integrity-check a certificate; raises CertificateError."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != f"{CERT_HEADER} {CERT_VERSION}":
        raise CertificateError("bad header or unsupported version")
    if len(lines) != len(KEYS) + 2:
        raise CertificateError("wrong number of lines")
    body = "\n".join(lines[:-1]) + "\n"
    tag, _, dig = lines[-1].partition(" ")
    if tag != "digest" or dig != hashlib.sha256(body.encode()).hexdigest():
        raise CertificateError("digest mismatch")
    out = {}
    for key, ln in zip(KEYS, lines[1:-1]):
        k, _, raw = ln.partition(" ")
        if k != key:
            raise CertificateError(f"expected key {key!r}, found {k!r}")
        try:
            out[k] = json.loads(raw)
        except json.JSONDecodeError as e:
            raise CertificateError(f"bad value for {key}: {e}") from None
    if hashlib.sha256(out["spec"].encode()).hexdigest() != out["spec-sha256"]:
        raise CertificateError("embedded spec does not match its digest")
    return out


def verify_certificate(text: str) -> tuple[bool, bool, list[str]]:
    """Recompute everything from the embedded spec.

    Returns ``(authentic, valid, mismatched keys)``: ``authentic`` when the
    recomputed certificate is byte-identical, ``valid`` when its recomputed
    status is VALID. Stored flags are never trusted.
    """
    fields = parse_certificate(text)
    try:
        fresh, result = build_certificate(fields["spec"])
    except SpecError as e:
        raise CertificateError(f"embedded spec does not parse: {e}") from None
    if fresh == text:
        return True, result.valid, []
    again = parse_certificate(fresh)
    bad = [k for k in KEYS if again[k] != fields[k]]
    return False, result.valid, bad or ["digest"]
