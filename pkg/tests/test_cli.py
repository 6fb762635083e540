import hashlib
import json

import pytest

from braidcsp.certificate import CertificateError, parse_certificate, verify_certificate
from braidcsp.cli import main
from braidcsp.specfile import SpecError, override, parse_spec, render_spec

from conftest import SPECS

S3_TEXT = (SPECS / "s3.spec").read_text()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------- spec files

def test_parse_spec():
    sf = parse_spec(S3_TEXT)
    assert (sf.n, sf.ell, sf.degree) == (4, 2, 3)
    assert sf.images == [(1, 0, 2), (0, 2, 1)]
    assert sf.quotient_spec().image().order() == 6
    assert parse_spec(render_spec(sf)).images == sf.images


@pytest.mark.parametrize("text", [
    "",
    "braidcsp-spec 2\nn 4\nell 2\ndegree 3\nimage g1 = (1 2)\nimage g2 = (2 3)\n",
    "braidcsp-spec 1\nn 4\nell 2\nimage g1 = (1 2)\nimage g2 = (2 3)\n",
    "braidcsp-spec 1\nn 4\nell 2\ndegree 3\nimage g1 = (1 2)\n",
    "braidcsp-spec 1\nn 4\nell 2\ndegree 3\nimage g1 = (1 4)\nimage g2 = (2 3)\n",
    "braidcsp-spec 1\nn 4\nell two\ndegree 3\nimage g1 = (1 2)\nimage g2 = (2 3)\n",
    "braidcsp-spec 1\nn 4\nell 2\ndegree 3\ncolour red\nimage g1 = (1 2)\nimage g2 = (2 3)\n",
    "braidcsp-spec 1\nn 3\nell 2\ndegree 3\nimage g1 = (1 2)\n",
])
def test_parse_spec_rejects(text):
    with pytest.raises(SpecError):
        parse_spec(text)


def test_override_changes_digest():
    sf = parse_spec(S3_TEXT)
    assert override(sf) is sf
    o = override(sf, ell=3, seed=5)
    assert o.ell == 3 and o.options["seed"] == 5 and o.digest != sf.digest
    assert parse_spec(o.text).ell == 3


# ---------------------------------------------------------------- commands

def test_witness_precondition_exit(tmp_path):
    bad = write(tmp_path, "n3.spec", "braidcsp-spec 1\nn 3\nell 2\ndegree 3\nimage g1 = (1 2)\n")
    assert main(["witness", bad, "-o", str(tmp_path / "c")]) == 2
    assert main(["witness", str(tmp_path / "missing.spec"), "-o", str(tmp_path / "c")]) == 2


def test_witness_cap_exit(tmp_path):
    assert main(["witness", str(SPECS / "s3.spec"), "-o", str(tmp_path / "c"), "--cap", "5"]) == 3
    assert main(["witness", str(SPECS / "klein4.spec"), "-o", str(tmp_path / "c"), "--cap", "10"]) == 3


@pytest.fixture(scope="module")
def s3_cert(tmp_path_factory):
    d = tmp_path_factory.mktemp("cert")
    out = d / "s3.cert"
    code = main(["witness", str(SPECS / "s3.spec"), "-o", str(out)])
    return code, out.read_text(), d


def test_witness_writes_certificate(s3_cert):
    code, text, _ = s3_cert
    fields = parse_certificate(text)
    flags = dict(fields["flags"])
    # every flag except the strict centralizer hypothesis holds on this spec
    assert [k for k, v in flags.items() if not v] == ["centralizer_condition"]
    assert fields["status"] == "INVALID" and code == 4
    assert fields["spec"] == S3_TEXT
    assert fields["spec-sha256"] == hashlib.sha256(S3_TEXT.encode()).hexdigest()
    assert fields["orbit"]["size"] == 6


def test_witness_deterministic(s3_cert, tmp_path):
    _, text, _ = s3_cert
    out = tmp_path / "again.cert"
    main(["witness", str(SPECS / "s3.spec"), "-o", str(out)])
    assert out.read_text() == text


def test_verify_fresh(s3_cert):
    code, text, d = s3_cert
    authentic, valid, bad = verify_certificate(text)
    assert authentic and not valid and bad == []
    assert main(["verify", str(d / "s3.cert")]) == code


def test_verify_byte_tamper(s3_cert, tmp_path):
    _, text, _ = s3_cert
    p = write(tmp_path, "t.cert", text.replace('"orbit_size":6', '"orbit_size":7'))
    assert main(["verify", p]) == 5
    with pytest.raises(CertificateError):
        parse_certificate(text[:-10])


def test_verify_resealed_tamper(s3_cert, tmp_path):
    _, text, _ = s3_cert
    lines = text.splitlines()
    lines = [ln.replace('["centralizer_condition",false]', '["centralizer_condition",true]') for ln in lines[:-1]]
    lines = [ln.replace('"status":', '"status":') for ln in lines]
    body = "\n".join(lines) + "\n"
    forged = body + f"digest {hashlib.sha256(body.encode()).hexdigest()}\n"
    authentic, _, bad = verify_certificate(forged)
    assert not authentic and "flags" in bad
    assert main(["verify", write(tmp_path, "f.cert", forged)]) == 5


def test_emit_intermediate_and_json(tmp_path, capsys):
    out = tmp_path / "c"
    code = main(["witness", str(SPECS / "s3.spec"), "-o", str(out), "--emit-intermediate", "--json", "--seed", "3"])
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "INVALID" and code == 4
    dump = json.loads((tmp_path / "c.intermediate.json").read_text())
    assert len(dump["orbit"]) == 6
    assert parse_certificate(out.read_text())["seed"] == 3


def test_birman_commands(capsys):
    assert main(["birman", str(SPECS / "klein4.spec")]) == 0
    assert main(["birman", str(SPECS / "s3.spec")]) == 0
    assert main(["birman", str(SPECS / "z3z3.spec")]) == 0
    assert main(["birman", str(SPECS / "z3z3.spec"), "--sign", "1"]) == 4
    assert main(["birman", str(SPECS / "z3z3.spec"), "--all-conjugators"]) == 4
    assert main(["birman", str(SPECS / "s3.spec"), "--all-conjugators", "--json"]) == 0


def test_centerless_command(capsys):
    assert main(["centerless", str(SPECS / "klein4.spec"), "--ell", "3"]) == 0
    assert main(["centerless", str(SPECS / "klein4.spec"), "--json"]) == 4
    info = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert info["R_order"] == "2^3*4" and info["center_order"] == 4


def test_cyclic_spec_needs_centerless(tmp_path):
    # cyclic image -> mod-2 abelianization (Klein four) -> centerless quotient too large for phi
    assert main(["witness", str(SPECS / "z2.spec"), "-o", str(tmp_path / "c")]) == 3
