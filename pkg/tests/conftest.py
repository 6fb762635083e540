from pathlib import Path

import pytest

from braidcsp.fingroup import parse_cycles, perm_group
from braidcsp.pipeline import make_spec, q_level

SPECS = Path(__file__).resolve().parent.parent / "specs"

CASES = {
    "S3": (2, 3, ["(1 2)", "(2 3)"]),
    "V4": (2, 4, ["(1 2)(3 4)", "(1 3)(2 4)"]),
    "Z3xZ3": (3, 6, ["(1 2 3)", "(4 5 6)"]),
}


def spec_for(name, n=4, ell=None):
    e, degree, cycles = CASES[name]
    perms = [parse_cycles(c, degree) for c in cycles]
    P = perm_group(perms, degree, name)
    P.enumerate()
    return make_spec(n, e if ell is None else ell, P, perms)


@pytest.fixture(scope="session")
def qlevels():
    return {name: (spec_for(name), q_level(spec_for(name))) for name in CASES}
