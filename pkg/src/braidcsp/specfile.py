"""Line-oriented quotient specifications.

Example::

    braidcsp-spec 1
    n 4
    ell 2
    degree 3
    image g1 = (1 2)
    image g2 = (2 3)
    seed 0

Blank lines and ``#`` comments are ignored. ``image`` lines give the image of
each generator of the rank ``n-2`` free group in cycle notation on
``1..degree``; the target group is the group they generate.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

from .fingroup import DEFAULT_CAP, format_cycles, parse_cycles, perm_group
from .pipeline import DEFAULT_ORBIT_CAP, PipelineOptions, QuotientSpec, make_spec

SPEC_VERSION = 1
SPEC_HEADER = "braidcsp-spec"
AUT_GENS = ("artin+inner",)

_INT_KEYS = {"n", "ell", "degree", "cap", "orbit-cap", "seed", "samples", "max-len"}


class SpecError(ValueError):
    """Malformed or unsupported specification text."""


@dataclass
class SpecFile:
    n: int
    ell: int
    degree: int
    images: list
    options: dict = field(default_factory=dict)
    aut_gens: str = "artin+inner"
    text: str = ""

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()

    def quotient_spec(self) -> QuotientSpec:
        P = perm_group(self.images, self.degree, name="P")
        P.enumerate(self.options.get("cap", DEFAULT_CAP))
        return make_spec(self.n, self.ell, P, self.images)

    def pipeline_options(self) -> PipelineOptions:
        o = self.options
        return PipelineOptions(
            cap=o.get("cap", DEFAULT_CAP),
            orbit_cap=o.get("orbit-cap", DEFAULT_ORBIT_CAP),
            seed=o.get("seed", 0),
            samples=o.get("samples", 10_000),
            max_len=o.get("max-len", 40),
        )


def parse_spec(text: str) -> SpecFile:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise SpecError("empty spec")
    head = lines[0].split()
    if len(head) != 2 or head[0] != SPEC_HEADER:
        raise SpecError(f"missing '{SPEC_HEADER} <version>' header")
    if head[1] != str(SPEC_VERSION):
        raise SpecError(f"unsupported spec version {head[1]!r}")
    vals: dict = {}
    images: dict = {}
    aut = "artin+inner"
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        rest = rest.strip()
        if key == "image":
            lhs, eq, rhs = rest.partition("=")
            lhs = lhs.strip()
            if not eq or not (lhs.startswith("g") and lhs[1:].isdigit()):
                raise SpecError(f"bad image line {ln!r}")
            j = int(lhs[1:])
            if j in images:
                raise SpecError(f"duplicate image for {lhs}")
            images[j] = rhs.strip()
        elif key == "aut-gens":
            if rest not in AUT_GENS:
                raise SpecError(f"unknown aut-gens {rest!r}")
            aut = rest
        elif key in _INT_KEYS:
            if key in vals:
                raise SpecError(f"duplicate key {key}")
            try:
                vals[key] = int(rest)
            except ValueError:
                raise SpecError(f"{key} needs an integer, got {rest!r}") from None
        else:
            raise SpecError(f"unknown key {key!r}")
    for k in ("n", "ell", "degree"):
        if k not in vals:
            raise SpecError(f"missing {k}")
    n, ell, degree = vals.pop("n"), vals.pop("ell"), vals.pop("degree")
    if degree < 1:
        raise SpecError("degree must be positive")
    if n < 4:
        raise SpecError(f"need n >= 4 punctures, got {n}")
    if sorted(images) != list(range(1, n - 1)):
        raise SpecError(f"need images for g1..g{n - 2}")
    try:
        perms = [parse_cycles(images[j], degree) for j in range(1, n - 1)]
    except ValueError as e:
        raise SpecError(str(e)) from None
    return SpecFile(n, ell, degree, perms, vals, aut, text)


def override(spec: SpecFile, ell: Optional[int] = None, **options) -> SpecFile:
    """Apply command-line overrides; the text is re-rendered so its digest covers them."""
    options = {k: v for k, v in options.items() if v is not None}
    if ell is None and not options:
        return spec
    out = SpecFile(spec.n, spec.ell if ell is None else ell, spec.degree, list(spec.images),
                   {**spec.options, **options}, spec.aut_gens)
    out.text = render_spec(out)
    return out


def render_spec(spec: SpecFile) -> str:
    lines = [f"{SPEC_HEADER} {SPEC_VERSION}", f"n {spec.n}", f"ell {spec.ell}", f"degree {spec.degree}"]
    lines += [f"image g{j} = {format_cycles(p)}" for j, p in enumerate(spec.images, 1)]
    for k in sorted(spec.options):
        lines.append(f"{k} {spec.options[k]}")
    lines.append(f"aut-gens {spec.aut_gens}")
    return "\n".join(lines) + "\n"
