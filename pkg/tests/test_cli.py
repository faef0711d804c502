"""
Tests for CLI commands.

These tests run actual CLI commands via subprocess to verify integration.
"""

import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

from g2cert.catalog import default_db_dir
from g2cert.config import DB_ENV


@pytest.fixture
def run(tmp_path):
    """Run g2cert with an isolated HOME; returns the CompletedProcess."""
    fake_home = tmp_path / "home"
    fake_home.mkdir()
    env = os.environ.copy()
    env["HOME"] = str(fake_home)
    env.pop(DB_ENV, None)

    def _run(*args, timeout=30, **extra_env):
        return subprocess.run(
            ["g2cert", *args],
            cwd=tmp_path,
            env={**env, **extra_env},
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    return _run


class TestVerify:
    """g2cert verify"""

    def test_37B_passes(self, run):
        result = run("verify", "37B")
        assert result.returncode == 0, f"verify failed: {result.stdout}{result.stderr}"
        assert "PASS" in result.stdout
        assert "lambda" in result.stdout

    def test_37B_json(self, run):
        result = run("verify", "37B", "--json", "--canonical")
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["entries"][0]["status_verified"] == "PURE_VERIFIED"
        assert "seconds" not in data["entries"][0]

    def test_external_citation(self, run):
        result = run("verify", "n2")
        assert result.returncode == 0
        assert "EXTERNAL_CITATION" in result.stdout

    def test_family_value_outside_constraint(self, run):
        result = run("verify", "147E", "--param", "1")
        assert result.returncode == 2
        assert "error:" in result.stderr

    def test_family_needs_param(self, run):
        result = run("verify", "147E")
        assert result.returncode == 2
        assert "--param" in result.stderr

    def test_obstructed_member(self, run):
        result = run("verify", "1357N", "--param", "-2")
        assert result.returncode == 1
        assert "1357N(-2) has no certificate" in result.stdout

    def test_unknown_name(self, run):
        result = run("verify", "99Z")
        assert result.returncode == 2
        assert "99Z" in result.stderr

    def test_certificate_file(self, run, tmp_path):
        cert = tmp_path / "cert.yaml"
        cert.write_text("omega: e13+e24-e67\npsi: e127-e146+e236-e347\neta: e7-e5\n")
        result = run("verify", "37B", "--cert", str(cert))
        assert result.returncode == 1
        assert "FAIL" in result.stdout

    @pytest.mark.parametrize("tail, message", [
        ("eta: e5\n", "FAIL"),
        ("eta: e7\n", "X inference"),
        ("eta: e7\nX: e5\n", "eta(X) != 0"),
    ])
    def test_corrupted_37B_fails(self, run, tmp_path, tail, message):
        cert = tmp_path / "cert.yaml"
        cert.write_text("omega: e13+e24-e67\npsi: e127-e146+e236-e347\n" + tail)
        result = run("verify", "37B", "--cert", str(cert))
        assert result.returncode == 1, result.stderr
        assert message in result.stdout + result.stderr

    def test_cited_regime(self, run):
        result = run("verify", "1357N", "--param", "-3")
        assert result.returncode == 0, result.stderr
        assert "EXTERNAL_CITATION" in result.stdout
        assert "1357N@L<-2" in result.stdout

    def test_family_member(self, run):
        result = run("verify", "1357N", "--param", "1/3", "--json")
        assert result.returncode == 0, result.stdout
        assert json.loads(result.stdout)["entries"][0]["status_verified"] == "PURE_VERIFIED"


class TestObstruct:
    """g2cert obstruct"""

    def test_pinned_ideal(self, run):
        result = run("obstruct", "357C")
        assert result.returncode == 0, result.stderr
        assert "ideal certificate verified" in result.stdout

    def test_certificate_file(self, run, tmp_path):
        cert = tmp_path / "obstruction.yaml"
        cert.write_text("method: contraction\nX: e6\nY: e7\nU: [e13, e15]\n")
        result = run("obstruct", "27A", "--cert", str(cert), "--json")
        assert result.returncode == 0, result.stderr
        assert json.loads(result.stdout)["entries"][0]["method"] == "contraction"


class TestCohomologyAndList:
    """g2cert cohomology / list"""

    def test_abelian_degree_four(self, run):
        result = run("cohomology", "n1", "--degree", "4")
        assert result.returncode == 0
        assert "dim H^4(n1) = 35" in result.stdout

    def test_betti_numbers(self, run):
        result = run("cohomology", "37B", "--all-degrees", "--json")
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["poincare_duality"]
        assert data["betti"][1] == 4

    def test_step_four_obstructed(self, run):
        result = run("list", "--step", "4", "--status", "no-coclosed")
        assert result.returncode == 0
        names = sorted(line.split()[0] for line in result.stdout.splitlines() if line.strip())
        assert names == ["1357E", "1357N(-2)", "1457A", "1457B"]

    def test_families(self, run):
        result = run("list", "--family", "--json")
        data = {f["name"]: f for f in json.loads(result.stdout)}
        assert data["1357N"]["regimes"] == ["L<-2", "-2<L<0", "L=0", "L>0"]


class TestClassify:
    """g2cert classify"""

    @pytest.fixture
    def step2_db(self, tmp_path):
        # 27B has no pinned obstruction; leave it out so nothing searches.
        target = tmp_path / "db"
        shutil.copytree(default_db_dir(), target)
        path = target / "algebras.db"
        path.write_text("".join(
            line for line in path.read_text().splitlines(keepends=True) if not line.startswith("27B |")
        ))
        return target

    def test_needs_scope(self, run):
        assert run("classify").returncode == 2

    def test_deterministic(self, run, step2_db, tmp_path):
        out = tmp_path / "step2.json"
        args = ("classify", "--step", "2", "--json", "--canonical", "--db", str(step2_db))
        first = run(*args, "--output", str(out), timeout=300)
        second = run(*args, timeout=300)
        assert first.stdout == second.stdout
        assert json.loads(out.read_text()) == json.loads(first.stdout)
        statuses = {e["name"]: e["status_verified"] for e in json.loads(first.stdout)["entries"]}
        assert len(statuses) == 8
        assert statuses["37B"] == "PURE_VERIFIED"
        assert statuses["27A"] == "OBSTRUCTED_VERIFIED"

    def test_strict_checksums(self, run, tmp_path):
        target = tmp_path / "db"
        shutil.copytree(default_db_dir(), target)
        path = target / "obstructions.db"
        path.write_text(path.read_text() + "357A | method=ideal | a=e1 | b=e2\n")
        relaxed = run("list", "--step", "2", "--db", str(target))
        assert relaxed.returncode == 0
        assert "checksum mismatch" in relaxed.stderr
        strict = run("list", "--step", "2", "--db", str(target), "--strict")
        assert strict.returncode == 2
        assert "checksum mismatch" in strict.stderr

    def test_environment_database(self, run, tmp_path):
        result = run("list", G2CERT_DB=str(tmp_path / "nowhere"))
        assert result.returncode == 2
        assert "nowhere" in result.stderr
