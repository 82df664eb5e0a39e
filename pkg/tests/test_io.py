"""Canonical serialization and the file formats used by the command line."""

import io
import math

import numpy as np
import pytest

from majorize import (
    DiagonalState,
    Experiment,
    GridSpec,
    InvalidDataError,
    ThermalSystem,
    certify_dichotomy_exact,
    classify_minimal,
    find_large_sample_n,
    majorizes,
    renyi,
    thermal_check,
)
from majorize.io import (
    canonical_json,
    divergence_csv,
    experiment_from_dict,
    experiment_to_dict,
    feasibility_to_dict,
    format_float,
    load_experiment,
    load_thermal,
    power_report_to_dict,
    report_to_dict,
    save_experiment,
    search_to_dict,
    thermal_to_dict,
)


# -- float tokens -----------------------------------------------------------------


def test_float_tokens():
    assert format_float(0.0) == "0"
    assert format_float(-0.0) == "0"
    assert format_float(math.inf) == "inf"
    assert format_float(-math.inf) == "-inf"
    assert format_float(0.1) == "0.10000000000000001"
    with pytest.raises(InvalidDataError):
        format_float(math.nan)


def test_float_tokens_roundtrip():
    for x in (1.0 / 3.0, 1e-300, 2.0**52 + 1.0, -7.25e17):
        assert float(format_float(x)) == x


# -- canonical JSON -----------------------------------------------------------------


def test_canonical_json_sorts_keys_and_quotes_infinities():
    text = canonical_json({"b": math.inf, "a": [1, True, None]})
    assert text.index('"a"') < text.index('"b"')
    assert '"inf"' in text
    assert text.endswith("\n")


def test_canonical_json_renders_arrays_and_enums():
    from majorize import Verdict

    text = canonical_json({"m": np.array([[0.5, 0.5]]), "v": Verdict.SUFFICIENT})
    assert '"SUFFICIENT"' in text
    assert "0.5" in text


def test_canonical_json_is_deterministic():
    payload = {"x": 1.0 / 3.0, "y": {"nested": [0.0, -0.0, 1e-9]}}
    assert canonical_json(payload) == canonical_json(dict(reversed(payload.items())))


def test_canonical_json_rejects_bad_values():
    with pytest.raises(InvalidDataError):
        canonical_json({"x": math.nan})
    with pytest.raises(InvalidDataError):
        canonical_json({1: "non-string key"})
    with pytest.raises(InvalidDataError):
        canonical_json({"x": object()})


# -- experiment files ---------------------------------------------------------------


def test_experiment_dict_roundtrip():
    exp = Experiment(([0.5, 0.25, 0.25], [0.0, 0.5, 0.5]), labels=("ref", "probe"))
    again = experiment_from_dict(experiment_to_dict(exp))
    assert again == exp
    assert again.labels == ("ref", "probe")


def test_experiment_json_file_roundtrip(tmp_path):
    exp = Experiment(([0.75, 0.25], [0.5, 0.5]))
    path = str(tmp_path / "exp.json")
    save_experiment(exp, path)
    assert load_experiment(path) == exp
    # identical content on a second save
    save_experiment(exp, str(tmp_path / "exp2.json"))
    assert (tmp_path / "exp.json").read_bytes() == (tmp_path / "exp2.json").read_bytes()


def test_experiment_csv_loading(tmp_path):
    path = tmp_path / "exp.csv"
    path.write_text("first,second\n0.75,0.5\n0.25,0.5\n")
    exp = load_experiment(str(path))
    assert exp == Experiment(([0.75, 0.25], [0.5, 0.5]), labels=("first", "second"))
    assert exp.labels == ("first", "second")


def test_csv_failures(tmp_path):
    short = tmp_path / "short.csv"
    short.write_text("only,a,header\n")
    with pytest.raises(InvalidDataError):
        load_experiment(str(short))
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("a,b\n0.5,0.5\n0.5\n")
    with pytest.raises(InvalidDataError):
        load_experiment(str(ragged))
    words = tmp_path / "words.csv"
    words.write_text("a,b\nhalf,0.5\n")
    with pytest.raises(InvalidDataError):
        load_experiment(str(words))


def test_json_failures(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidDataError):
        load_experiment(str(bad))
    missing = tmp_path / "missing.json"
    missing.write_text('{"labels": null}\n')
    with pytest.raises(InvalidDataError):
        load_experiment(str(missing))


def test_stdin_and_stdout_paths(monkeypatch, capsys):
    exp = Experiment(([0.5, 0.5],))
    monkeypatch.setattr(
        "sys.stdin", io.StringIO(canonical_json(experiment_to_dict(exp)))
    )
    assert load_experiment("-") == exp
    save_experiment(exp, "-")
    assert '"columns"' in capsys.readouterr().out


def test_thermal_file(tmp_path):
    path = tmp_path / "thermal.json"
    path.write_text(
        '{"energies": [1.0, 2.0], "beta": 0.693, "rho": [0.9, 0.1], '
        '"sigma": [0.7, 0.3]}\n'
    )
    rho, sigma, system = load_thermal(str(path))
    assert rho.eigenvalues.tolist() == [0.9, 0.1]
    assert sigma.eigenvalues.tolist() == [0.7, 0.3]
    assert system.beta == 0.693
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text('{"energies": [1.0], "beta": 1.0}\n')
    with pytest.raises(InvalidDataError):
        load_thermal(str(incomplete))


# -- report serialization -----------------------------------------------------------


def pair():
    p = Experiment(([0.5, 0.5, 0.0], [0.25, 0.25, 0.5]))
    q = Experiment(([0.45, 0.45, 0.1], [0.275, 0.275, 0.45]))
    return p, q


def test_certification_report_serializes_deterministically():
    p, q = pair()
    grid = GridSpec(simplex_resolution=4, alpha_max=8.0)
    first = canonical_json(report_to_dict(certify_dichotomy_exact(p, q, grid)))
    second = canonical_json(report_to_dict(certify_dichotomy_exact(p, q, grid)))
    assert first == second
    data = report_to_dict(certify_dichotomy_exact(p, q, grid))
    assert set(data) == {"regime", "verdict", "note", "grid", "min_margin", "checks"}
    assert all(
        set(c)
        == {
            "functional",
            "alpha",
            "charset",
            "column",
            "value_p",
            "value_q",
            "margin",
            "strict",
            "direction",
        }
        for c in data["checks"]
    )


def test_feasibility_and_search_serialization():
    p, q = pair()
    feas = feasibility_to_dict(majorizes(p, q))
    assert feas["feasible"] is True and feas["status"] == "feasible"
    assert np.asarray(feas["witness"]).shape == (q.n_rows, p.n_rows)
    found = search_to_dict(find_large_sample_n(p, q, n_max=2))
    assert found["kind"] == "large_sample"
    assert found["n_found"] == 1 and found["capped"] is False
    canonical_json(found)  # must be serializable as-is


def test_power_and_thermal_serialization():
    p = Experiment(([0.5, 0.5, 0.0], [0.5, 0.0, 0.5]))
    data = power_report_to_dict(classify_minimal(p))
    assert data["is_power_universal"] is True
    assert all(w["satisfied"] for w in data["witnesses"])
    system = ThermalSystem([1.0, 2.0], math.log(2.0))
    verdict = thermal_check(
        DiagonalState([0.9, 0.1]), DiagonalState([0.8, 0.2]), system
    )
    out = thermal_to_dict(verdict)
    assert out["answer"] == "YES"
    canonical_json(out)


# -- delimited tables ----------------------------------------------------------------


def test_divergence_csv_uses_canonical_tokens():
    p, q = [0.75, 0.25], [0.5, 0.5]
    rows = [
        {"alpha": a, "value": renyi(p, q, a)} for a in (0.5, 1.0, 2.0, math.inf)
    ]
    text = divergence_csv(rows, ["alpha", "value"])
    lines = text.strip().split("\n")
    assert lines[0] == "alpha,value"
    assert len(lines) == 5
    assert lines[4].startswith("inf,")
    assert lines[2].split(",")[1] == format_float(renyi(p, q, 1.0))
