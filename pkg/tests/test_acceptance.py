"""Each acceptance criterion at its stated bound, exact, one PASS/FAIL line per criterion."""
import os

import pytest

from conftest import ACCEPTANCE_LINES
from hmfkernel.acceptance import CHECKS, KNOWN_FAILURES, run_checks
from hmfkernel.cli import main

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


@pytest.fixture(scope="module")
def results():
    return {r.key: r for r in run_checks("full", workers=1)}


def _params():
    out = []
    for key, _ in CHECKS:
        marks = [pytest.mark.xfail(strict=True, reason="real-quadratic kernel mismatch, see README")] \
            if key in KNOWN_FAILURES else []
        out.append(pytest.param(key, marks=marks, id=key))
    return out


@pytest.mark.parametrize("key", _params())
def test_criterion(results, key):
    r = results[key]
    line = f"{r.status()} {r.key} {r.title}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    for detail in r.lines:
        print("   ", detail)
    assert r.passed, "\n".join(r.lines)


def _result_files(root):
    out = {}
    for dirpath, _, names in os.walk(root):
        for n in names:
            if n.endswith(".manifest.json"):
                continue          # wall time differs between runs
            p = os.path.join(dirpath, n)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_verify_all_is_deterministic(tmp_path, capsys):
    cfg = os.path.abspath(os.path.join(CONFIGS, "verify-quick.json"))
    a, b = tmp_path / "a", tmp_path / "b"
    rc_a = main(["verify-all", "--config", cfg, "--out", str(a), "--workers", "1"])
    rc_b = main(["verify-all", "--config", cfg, "--out", str(b), "--workers", "2"])
    fa, fb = _result_files(a), _result_files(b)
    same = bool(fa) and fa == fb
    summary = fa.get(os.path.join("verify-all", "summary.txt"), b"").decode()
    failed = [l.split()[1] for l in summary.splitlines() if l.startswith("FAIL")]
    ok = same and rc_a == rc_b == 4 and failed == sorted(KNOWN_FAILURES)
    line = f"{'PASS' if ok else 'FAIL'} C11 verify-all result files byte-identical across runs"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert same, sorted(set(fa) ^ set(fb)) or [k for k in fa if fa[k] != fb.get(k)]
    assert rc_a == rc_b == 4
    assert failed == sorted(KNOWN_FAILURES)
