"""End-to-end command-line tests via subprocess."""

from __future__ import annotations

import json
import subprocess
import sys

from kcausal import (
    coupling_from_jsonable,
    measure_from_jsonable,
    space_from_jsonable,
    verify_coupling,
)

CHAIN2 = {"events": ["a", "b"], "relation": {"kind": "explicit", "pairs": [["a", "b"]]}}
CHAIN3 = {
    "events": ["a", "b", "c"],
    "relation": {"kind": "explicit", "pairs": [["a", "b"], ["b", "c"]]},
}
DIAMOND = {
    "events": ["a", "b", "c", "d"],
    "relation": {
        "kind": "explicit",
        "pairs": [["a", "b"], ["a", "c"], ["b", "d"], ["c", "d"]],
    },
}
CYCLE = {"events": ["a", "b"], "relation": {"kind": "explicit", "pairs": [["a", "b"], ["b", "a"]]}}

DIRAC_A = {"weights": {"a": "1"}}
DIRAC_B = {"weights": {"b": "1"}}


def run_cli(*args: str):
    return subprocess.run(
        [sys.executable, "-m", "kcausal", *args],
        capture_output=True,
        text=True,
    )


def write(tmp_path, name: str, obj) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


class TestCheck:
    def test_feasible_pair(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN2)
        mu = write(tmp_path, "mu.json", DIRAC_A)
        nu = write(tmp_path, "nu.json", DIRAC_B)
        witness = tmp_path / "witness.json"
        cert = tmp_path / "cert.json"
        result = run_cli(
            "check", space, mu, nu, "--witness", str(witness), "--certificate", str(cert)
        )
        assert result.returncode == 0
        assert result.stdout == "feasible\n"
        assert json.loads(witness.read_text()) == {"pairs": [["a", "b", "1"]]}
        assert json.loads(cert.read_text())["verdict"] == "feasible"

    def test_infeasible_pair(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN2)
        mu = write(tmp_path, "mu.json", DIRAC_B)
        nu = write(tmp_path, "nu.json", DIRAC_A)
        witness = tmp_path / "witness.json"
        cert = tmp_path / "cert.json"
        result = run_cli(
            "check", space, mu, nu, "--witness", str(witness), "--certificate", str(cert)
        )
        assert result.returncode == 1
        assert result.stdout == "infeasible\n"
        assert not witness.exists()
        assert json.loads(cert.read_text()) == {
            "verdict": "infeasible",
            "violator": ["b"],
            "mu_B": "1",
            "nu_KplusB": "0",
        }

    def test_oracle_cross_check(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        mu = write(tmp_path, "mu.json", {"weights": {"b": "1/2", "c": "1/2"}})
        nu = write(tmp_path, "nu.json", {"weights": {"a": "1/2", "d": "1/2"}})
        result = run_cli("check", space, mu, nu, "--oracle")
        assert result.returncode == 1
        assert result.stdout == "infeasible\n"
        assert result.stderr == ""

    def test_unnormalized_measure(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN2)
        mu = write(tmp_path, "mu.json", {"weights": {"a": "1/3"}})
        nu = write(tmp_path, "nu.json", DIRAC_B)
        result = run_cli("check", space, mu, nu)
        assert result.returncode == 2
        assert "weights sum to 1/3" in result.stderr

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        space = write(tmp_path, "space.json", CHAIN2)
        nu = write(tmp_path, "nu.json", DIRAC_B)
        result = run_cli("check", str(bad), str(bad), nu)
        assert result.returncode == 2
        assert result.stderr.startswith("error:")
        result = run_cli("check", space, str(bad), nu)
        assert result.returncode == 2

    def test_missing_file(self, tmp_path):
        result = run_cli("check", str(tmp_path / "nope.json"), "x", "y")
        assert result.returncode == 2

    def test_unknown_event_in_measure(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN2)
        mu = write(tmp_path, "mu.json", {"weights": {"z": "1"}})
        nu = write(tmp_path, "nu.json", DIRAC_B)
        result = run_cli("check", space, mu, nu)
        assert result.returncode == 2


class TestClosure:
    def test_chain_closure(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN3)
        result = run_cli("closure", space)
        assert result.returncode == 0
        assert json.loads(result.stdout) == {
            "events": ["a", "b", "c"],
            "relation": {
                "kind": "explicit",
                "pairs": [
                    ["a", "a"],
                    ["a", "b"],
                    ["a", "c"],
                    ["b", "b"],
                    ["b", "c"],
                    ["c", "c"],
                ],
            },
        }

    def test_idempotent_round_trip(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        first = run_cli("closure", space)
        again = write(tmp_path, "closed.json", json.loads(first.stdout))
        second = run_cli("closure", again)
        assert second.returncode == 0
        assert second.stdout == first.stdout

    def test_byte_determinism(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        assert run_cli("closure", space).stdout == run_cli("closure", space).stdout


class TestUpsets:
    def test_diamond_upsets_canonical_order(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        result = run_cli("upsets", space)
        assert result.returncode == 0
        assert json.loads(result.stdout) == {
            "upsets": [
                [],
                ["d"],
                ["b", "d"],
                ["c", "d"],
                ["b", "c", "d"],
                ["a", "b", "c", "d"],
            ]
        }

    def test_size_bound(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        result = run_cli("upsets", space, "--max-events", "3")
        assert result.returncode == 2


class TestTimefn:
    def test_enumerate_chain(self, tmp_path):
        space = write(tmp_path, "space.json", CHAIN3)
        result = run_cli("timefn", space, "--enumerate")
        assert result.returncode == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0]) == {"values": {"a": "0", "b": "1", "c": "2"}}

    def test_enumerate_diamond(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        result = run_cli("timefn", space, "--enumerate")
        assert len(result.stdout.splitlines()) == 2

    def test_sampling_is_seed_deterministic(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        one = run_cli("timefn", space, "--sample", "3", "--seed", "5")
        two = run_cli("timefn", space, "--sample", "3", "--seed", "5")
        assert one.returncode == 0
        assert len(one.stdout.splitlines()) == 3
        assert one.stdout == two.stdout

    def test_sample_requires_seed(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        result = run_cli("timefn", space, "--sample", "3")
        assert result.returncode == 2
        assert "--seed" in result.stderr

    def test_sample_count_positive(self, tmp_path):
        space = write(tmp_path, "space.json", DIAMOND)
        assert run_cli("timefn", space, "--sample", "0", "--seed", "1").returncode == 2

    def test_cycle_exits_one_naming_the_pair(self, tmp_path):
        space = write(tmp_path, "space.json", CYCLE)
        result = run_cli("timefn", space, "--enumerate")
        assert result.returncode == 1
        assert "not stably causal" in result.stderr
        assert "'a'" in result.stderr and "'b'" in result.stderr


class TestGenerate:
    def test_random_dag_recipe(self, tmp_path):
        spec = write(tmp_path, "spec.json", {"kind": "random-dag", "n": 5, "p": 0.5, "seed": 11})
        result = run_cli("generate", spec)
        assert result.returncode == 0
        obj = json.loads(result.stdout)
        assert obj["events"] == ["e0", "e1", "e2", "e3", "e4"]
        assert run_cli("generate", spec).stdout == result.stdout

    def test_closure_relation_flag(self, tmp_path):
        spec = write(tmp_path, "spec.json", {"kind": "random-dag", "n": 4, "p": 0.7, "seed": 2})
        raw = json.loads(run_cli("generate", spec).stdout)
        closed = json.loads(run_cli("generate", spec, "--relation", "kplus").stdout)
        raw_pairs = {tuple(p) for p in raw["relation"]["pairs"]}
        closed_pairs = {tuple(p) for p in closed["relation"]["pairs"]}
        assert raw_pairs <= closed_pairs
        assert {(e, e) for e in closed["events"]} <= closed_pairs

    def test_sprinkle_recipe(self, tmp_path):
        spec = write(
            tmp_path,
            "spec.json",
            {"kind": "sprinkle", "n": 6, "dim": 2, "box": [[0, 1], [-1, 1]], "seed": 3},
        )
        result = run_cli("generate", spec)
        assert result.returncode == 0
        assert len(json.loads(result.stdout)["events"]) == 6

    def test_unknown_kind(self, tmp_path):
        spec = write(tmp_path, "spec.json", {"kind": "torus", "n": 3})
        assert run_cli("generate", spec).returncode == 2


class TestVerify:
    def test_single_suite(self, tmp_path):
        report = tmp_path / "report.json"
        result = run_cli(
            "verify", "--suite", "lemma6", "--trials", "3", "--report", str(report)
        )
        assert result.returncode == 0
        assert "lemma6: 3 passed, 0 failed" in result.stdout
        obj = json.loads(report.read_text())
        assert obj["config"]["trials"] == 3
        assert obj["suites"] == [{"suite": "lemma6", "passed": 3, "failed": 0}]
        assert obj["failures"] == []

    def test_comma_separated_suites(self, tmp_path):
        result = run_cli(
            "verify",
            "--suite",
            "minguzzi,prop2-transitivity",
            "--trials",
            "2",
            "--report",
            str(tmp_path / "r.json"),
        )
        assert result.returncode == 0
        assert result.stdout.splitlines() == [
            "prop2-transitivity: 2 passed, 0 failed",
            "minguzzi: 2 passed, 0 failed",
        ]

    def test_unknown_suite(self):
        result = run_cli("verify", "--suite", "bogus", "--trials", "1")
        assert result.returncode == 2
        assert "unknown suite" in result.stderr


class TestUsage:
    def test_no_subcommand(self):
        assert run_cli().returncode == 2

    def test_unknown_subcommand(self):
        assert run_cli("frobnicate").returncode == 2


class TestArtifactsFeedBackIntoTheApi:
    def test_witness_file_verifies(self, tmp_path):
        space_path = write(tmp_path, "space.json", CHAIN3)
        mu_obj = {"weights": {"a": "1/2", "b": "1/2"}}
        nu_obj = {"weights": {"b": "1/2", "c": "1/2"}}
        mu_path = write(tmp_path, "mu.json", mu_obj)
        nu_path = write(tmp_path, "nu.json", nu_obj)
        witness = tmp_path / "witness.json"
        result = run_cli("check", space_path, mu_path, nu_path, "--witness", str(witness))
        assert result.returncode == 0
        space = space_from_jsonable(CHAIN3)
        mu = measure_from_jsonable(mu_obj, space.events)
        nu = measure_from_jsonable(nu_obj, space.events)
        omega = coupling_from_jsonable(json.loads(witness.read_text()), space.events)
        assert verify_coupling(space, omega, mu, nu)
