import json

import pytest

from src.cli import (CACHE_FILE, EXIT_CONFIG, EXIT_FAIL, EXIT_INTERNAL, EXIT_OK, build_plan,
                     cache_file, load_config, main, parse_cases, parse_suites)
from src.dualitylab import SUITES
from src.errors import ConfigError
from src.utils import has_errors, validate_precision_parameters
from tests.strategies import fixture_path


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestConfig:
    def test_fixture_loads(self):
        config = load_config(fixture_path("flagship.cfg"))
        assert config.instance["lambda"] == "1 - zeta"
        assert config.suites["lemma1"] == {"window": "2"}

    def test_unknown_key(self, tmp_path):
        path = write(tmp_path, "bad.cfg", "[instance]\nring = modular\nmodulus = 4\ncolour = red\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_section(self, tmp_path):
        path = write(tmp_path, "bad.cfg", "[instance]\nring = modular\n[extras]\nx = 1\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_instance(self, tmp_path):
        path = write(tmp_path, "bad.cfg", "[run]\nsuites = all\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_parse_cases(self):
        assert parse_cases("2:2:1, 3:1:1") == ((2, 2, 1), (3, 1, 1))
        with pytest.raises(ConfigError):
            parse_cases("2:2")

    def test_parse_suites(self):
        assert parse_suites("all") == list(SUITES)
        assert parse_suites("lemma1, pairing") == ["lemma1", "pairing"]
        with pytest.raises(ConfigError):
            parse_suites("lemma3")

    def test_precision_warnings(self):
        assert validate_precision_parameters(2, 8, 3, 12) == []
        assert has_errors(validate_precision_parameters(0, 8, 3, 12))
        warnings = validate_precision_parameters(3, 8, 3, 12, ring_size=16)
        assert warnings and not has_errors(warnings)


class TestRun:
    def test_bad_lambda_fails(self, tmp_path, capsys):
        report = str(tmp_path / "report.json")
        code = main(["run", "--instance", fixture_path("bad-lambda.cfg"), "--report", report])
        assert code == EXIT_FAIL
        with open(report, encoding="utf-8") as fh:
            data = json.load(fh)
        assert data["summary"]["fail"] >= 1
        assert data["checks"][0]["evidence"]["error"] == "NotDivisible"
        assert "FAIL" in capsys.readouterr().out

    def test_char_p_lemma1_is_reproducible(self, tmp_path):
        first, second = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = ["run", "--instance", fixture_path("char-p.cfg"), "--suite", "lemma1"]
        assert main(args + ["--report", first]) == EXIT_OK
        assert main(args + ["--report", second]) == EXIT_OK
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()

    def test_char_p_theorem2(self, tmp_path):
        report = str(tmp_path / "report.json")
        code = main(["run", "--instance", fixture_path("char-p.cfg"), "--suite", "theorem2",
                     "--report", report])
        assert code == EXIT_OK
        with open(report, encoding="utf-8") as fh:
            data = json.load(fh)
        assert data["summary"] == {"total": 3, "pass": 3, "fail": 0, "skip": 0}
        assert data["metadata"]["suites"] == ["theorem2"]

    def test_flagship_fixture_passes(self, tmp_path):
        report = str(tmp_path / "report.json")
        assert main(["run", "--instance", fixture_path("flagship.cfg"), "--report", report]) == EXIT_OK
        with open(report, encoding="utf-8") as fh:
            data = json.load(fh)
        assert data["summary"]["fail"] == 0
        assert data["metadata"]["suites"] == list(SUITES)

    def test_char_p_fixture_passes_every_suite(self, tmp_path):
        report = str(tmp_path / "report.json")
        code = main(["run", "--instance", fixture_path("char-p.cfg"), "--suite", "all",
                     "--report", report])
        assert code == EXIT_OK
        with open(report, encoding="utf-8") as fh:
            data = json.load(fh)
        assert data["summary"]["fail"] == 0
        assert {c["check"] for c in data["checks"]} >= {"verschiebung-frobenius", "lemma2-congruence",
                                                       "diagram-congruences"}

    def test_missing_file(self, tmp_path):
        assert main(["run", "--instance", str(tmp_path / "nope.cfg")]) == EXIT_CONFIG

    def test_invalid_precision(self):
        code = main(["run", "--instance", fixture_path("char-p.cfg"), "--suite", "lemma1",
                     "--window", "0"])
        assert code == EXIT_CONFIG

    def test_show(self, capsys):
        assert main(["show", "--instance", fixture_path("char-p.cfg")]) == EXIT_OK
        out = capsys.readouterr().out
        assert "psi(X) = X^4" in out
        assert "X^4 = 0" in out

    def test_show_rank(self, capsys):
        assert main(["show", "--instance", fixture_path("char-p.cfg")]) == EXIT_OK
        assert "rank = 4" in capsys.readouterr().out

    def test_show_structure(self, capsys):
        assert main(["show", "--structure", "sum", "--prime", "2", "--index", "1"]) == EXIT_OK
        out = capsys.readouterr().out.strip()
        assert out.startswith("2\tsum\t1\t")
        assert "-1*X0*Y0" in out

    def test_show_structure_needs_index(self):
        assert main(["show", "--structure", "sum", "--prime", "2"]) == EXIT_CONFIG


class TestCache:
    def test_build_and_verify(self, tmp_path):
        cache = str(tmp_path / "structure.cache")
        assert main(["cache-build", "--cache", cache, "--prime", "2", "--depth", "2"]) == EXIT_OK
        assert main(["cache-verify", "--cache", cache]) == EXIT_OK

    def test_tampered_cache(self, tmp_path):
        cache = str(tmp_path / "structure.cache")
        assert main(["cache-build", "--cache", cache, "--prime", "2", "--depth", "2"]) == EXIT_OK
        with open(cache, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        lines = ["2\tsum\t0\t1*X0" if line.startswith("2\tsum\t0\t") else line for line in lines]
        with open(cache, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        assert main(["cache-verify", "--cache", cache]) == EXIT_INTERNAL

    def test_verify_missing_cache(self, tmp_path):
        assert main(["cache-verify", "--cache", str(tmp_path / "none")]) == EXIT_CONFIG

    def test_build_selected_kinds(self, tmp_path):
        cache = str(tmp_path / "structure.cache")
        args = ["cache-build", "--cache", cache, "--prime", "2", "--depth", "2",
                "--kind", "sum", "--kind", "frobenius"]
        assert main(args) == EXIT_OK
        with open(cache, encoding="utf-8") as fh:
            records = fh.read().splitlines()[1:]
        keys = [tuple(r.split("\t")[:3]) for r in records]
        assert keys == [("2", "frobenius", "0"), ("2", "frobenius", "1"),
                        ("2", "sum", "0"), ("2", "sum", "1")]

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["cache-build", "--cache", str(tmp_path / "c"), "--kind", "quotient"])

    @pytest.mark.parametrize("prime,depth", [(3, 5), (2, 6), (2, 0), (5, 2)])
    def test_depth_checked_before_building(self, tmp_path, prime, depth):
        cache = tmp_path / "structure.cache"
        code = main(["cache-build", "--cache", str(cache), "--prime", str(prime),
                     "--depth", str(depth)])
        assert code == EXIT_CONFIG
        assert not cache.exists()

    def test_build_plan(self):
        assert build_plan([3], None, ["t_a", "t_a"]) == [(3, 4, ["t_a"])]
        assert [entry[:2] for entry in build_plan(None, 2, None)] == [(2, 2), (3, 2)]
        with pytest.raises(ConfigError):
            build_plan([2], 9, None)

    def test_cache_directory(self, tmp_path):
        directory = tmp_path / "cache"
        directory.mkdir()
        code = main(["cache-build", "--cache", str(directory), "--prime", "2", "--depth", "2"])
        assert code == EXIT_OK
        assert (directory / CACHE_FILE).exists()
        assert cache_file(str(directory)) == str(directory / CACHE_FILE)
        assert main(["cache-verify", "--cache", str(directory)]) == EXIT_OK
        code = main(["run", "--instance", fixture_path("char-p.cfg"), "--suite", "lemma1",
                     "--cache", str(directory)])
        assert code == EXIT_OK
