import json
import os
import shutil
import subprocess
import sys

import pytest

from expgraph import groups
from expgraph.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


# -- exit-code matrix --------------------------------------------------------


@pytest.mark.parametrize(
    "argv,code",
    [
        (["order", "f4", "3"], 0),
        (["order", "e6", "2", "--format", "json"], 0),
        (["order", "f4", "6"], 2),
        (["order", "f4", "x"], 2),
        (["order", "g2", "3"], 2),
        (["pgraph", "f4", "3", "--format", "dot"], 0),
        (["pgraph", "e6", "2"], 0),
        (["pgraph", "f4", "4"], 2),
        (["zsig", "2", "6"], 0),
        (["zsig", "1", "6"], 2),
        (["zsig", "--", "-1", "3"], 2),
        (["zsig", "3", "0"], 2),
        (["klemma", "--a-max", "3", "--n-max", "4", "--i-max", "8"], 0),
        (["klemma", "--a-max", "1"], 2),
        (["audit", "f4", "--q", "3", "5"], 0),
        (["audit", "f4", "--q", "4"], 0),
        (["audit", "e6", "--q", "2"], 3),
        (["audit", "2e6", "--q", "3"], 3),
        (["audit", "f4", "--q", "6"], 2),
        (["audit", "f4", "--q-max", "1"], 2),
        (["audit", "f4", "--q", "3", "--jobs", "0"], 2),
        (["audit", "f4"], 2),
        (["audit", "f4", "--q", "3", "--q-max", "5"], 2),
        ([], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_audit_failure_exit_one(capsys, tmp_path):
    prof = tmp_path / "strict.profile"
    prof.write_text("e6.sandwich = expect_confirmed\n", encoding="utf-8")
    assert run(capsys, "audit", "e6", "--q", "2", "--profile", str(prof))[0] == 1


def test_audit_bad_profile_is_usage_error(capsys, tmp_path):
    prof = tmp_path / "bad.profile"
    prof.write_text("f4.sandwich = sometimes\n", encoding="utf-8")
    code, _, err = run(capsys, "audit", "f4", "--q", "3", "--profile", str(prof))
    assert code == 2 and "sometimes" in err
    assert run(capsys, "audit", "f4", "--q", "3", "--profile", str(tmp_path / "missing"))[0] == 2


# -- rendered output ---------------------------------------------------------


def test_order_text(capsys):
    code, out, _ = run(capsys, "order", "f4", "3")
    assert str(3**24 * 8 * 728 * 6560 * 531440) in out
    assert "3^24 * 2^15 * " in out


def test_order_json(capsys):
    _, out, _ = run(capsys, "order", "e6", "2", "--format", "json")
    data = json.loads(out)
    assert int(data["order"]) == 2**36 * 3 * 31 * 63 * 255 * 511 * 4095
    assert ["2", "36"] in data["factors"]


def test_order_rejects_non_prime_power_message(capsys):
    code, _, err = run(capsys, "order", "f4", "6")
    assert code == 2 and "not a prime power" in err


def test_pgraph_dot(capsys):
    _, out, _ = run(capsys, "pgraph", "f4", "3", "--format", "dot")
    assert out.count("subgraph cluster_") == 2
    pi2 = out.split("cluster_pi2", 1)[1]
    assert '"73";' in pi2 and pi2.count(";") == 2  # label line and one node
    assert "--" not in out


def test_pgraph_text_and_json(capsys):
    _, out, _ = run(capsys, "pgraph", "e6", "2")
    assert "rho = {5, 13, 17, 19, 31}" in out
    _, out, _ = run(capsys, "pgraph", "2e6", "2", "--format", "json")
    data = json.loads(out)
    assert data["pi2_value"] == "19" and data["partition"] == "Confirmed"


def test_zsig_text(capsys):
    assert run(capsys, "zsig", "2", "6")[1].strip() == "R = {}, k = 1, exception"
    assert run(capsys, "zsig", "3", "5")[1].strip() == "R = {11}, k = 121"
    data = json.loads(run(capsys, "zsig", "--format", "json", "--", "-3", "2")[1])
    assert data["exception"] is True and data["R"] == []


def test_klemma_text(capsys):
    _, out, _ = run(capsys, "klemma", "--a-max", "3", "--n-max", "4", "--i-max", "8")
    assert out.splitlines()[0].endswith("0 violations")


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)


# -- reports -----------------------------------------------------------------


def test_audit_stdout_roundtrip(capsys):
    _, out, _ = run(capsys, "audit", "f4", "--q", "3", "5")
    data = json.loads(out)
    assert json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n" == out
    assert data["classification"] == "clean" and data["exit_code"] == 0


def test_audit_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "audit", "2e6", "--q", "3", "5", "-o", str(target))
    assert code == 3
    assert str(target) in out and "discrepancy" in out
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["q_values"] == ["3", "5"]
    assert list(tmp_path.iterdir()) == [target]


def test_audit_jobs_does_not_change_report(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "audit", "e6", "--q-max", "30", "-o", str(a))
    run(capsys, "audit", "e6", "--q-max", "30", "-o", str(b), "--jobs", "3")

    def strip(p):
        d = json.loads(p.read_text(encoding="utf-8"))
        d.pop("generated_at")
        return d

    assert strip(a) == strip(b)


def test_q_max_sweeps_odd_only_for_f4(capsys):
    _, out, _ = run(capsys, "audit", "f4", "--q-max", "10")
    assert json.loads(out)["q_values"] == ["3", "5", "7", "9"]
    _, out, _ = run(capsys, "audit", "e6", "--q-max", "5")
    assert json.loads(out)["q_values"] == ["2", "3", "4", "5"]


# -- subprocess: module entry point and fixture override ---------------------


def _cli(*argv, env=None):
    return subprocess.run(
        [sys.executable, "-m", "expgraph", *argv],
        env={**os.environ, **(env or {})},
        capture_output=True,
        text=True,
    )


def test_module_entry_point():
    proc = _cli("zsig", "3", "5")
    assert proc.returncode == 0 and proc.stdout.strip() == "R = {11}, k = 121"


def test_corrupt_fixture_exit_two(tmp_path):
    src = groups.resources.files("expgraph") / "data" / groups.SPORADIC_FILE
    with groups.resources.as_file(src) as path:
        text = path.read_text(encoding="utf-8")
    (tmp_path / groups.SPORADIC_FILE).write_text(text.replace("95040", "95041"), encoding="utf-8")
    proc = _cli("audit", "f4", "--q", "3", env={groups.FIXTURE_ENV: str(tmp_path)})
    assert proc.returncode == 2 and "checksum" in proc.stderr


def test_fixture_override_valid(tmp_path):
    src = groups.resources.files("expgraph") / "data" / groups.SPORADIC_FILE
    with groups.resources.as_file(src) as path:
        shutil.copy(path, tmp_path / groups.SPORADIC_FILE)
    proc = _cli("audit", "f4", "--q", "3", env={groups.FIXTURE_ENV: str(tmp_path)})
    assert proc.returncode == 0
