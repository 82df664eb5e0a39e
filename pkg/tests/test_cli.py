"""End-to-end command-line runs, in process via main(argv)."""

import json
import math

import pytest

from majorize import Experiment, renyi
from majorize.cli import main
from majorize.io import canonical_json, experiment_to_dict, format_float

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_exp(tmp_path, name, columns, labels=None):
    path = tmp_path / name
    payload = experiment_to_dict(Experiment(columns, labels=labels))
    path.write_text(canonical_json(payload))
    return str(path)


@pytest.fixture
def pair(tmp_path):
    p = write_exp(tmp_path, "p.json", ([0.5, 0.5, 0.0], [0.25, 0.25, 0.5]))
    q = write_exp(tmp_path, "q.json", ([0.45, 0.45, 0.1], [0.275, 0.275, 0.45]))
    return p, q


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- exit codes -------------------------------------------------------------------


def test_check_exact_feasible(pair, capsys):
    p, q = pair
    code, out, _ = run(capsys, "check-exact", p, q)
    assert code == 0
    payload = json.loads(out)
    assert payload["feasible"] is True and payload["status"] == "feasible"


def test_check_exact_infeasible(pair, capsys):
    p, q = pair
    code, out, _ = run(capsys, "check-exact", q, p)
    assert code == 1
    assert json.loads(out)["feasible"] is False


def test_certify_exit_codes(pair, capsys):
    p, q = pair
    assert run(capsys, "certify", p, q)[0] == 0
    assert run(capsys, "certify", q, p)[0] == 1
    assert run(capsys, "certify", p, p)[0] == 2


def test_certify_json_payload(pair, capsys):
    p, q = pair
    code, out, _ = run(capsys, "certify", p, q)
    payload = json.loads(out)
    assert payload["verdict"] == "SUFFICIENT"
    assert payload["regime"] == "dichotomy"
    assert payload["grid"]["simplex_resolution"] == 8
    assert len(payload["checks"]) > 0


def test_certify_table_format(pair, capsys):
    p, q = pair
    code, out, _ = run(capsys, "certify", p, q, "--format", "table")
    assert code == 0
    assert "verdict: SUFFICIENT" in out
    assert "margin" in out


def test_search_found_and_not(tmp_path, capsys):
    p, q = (
        write_exp(tmp_path, "p.json", ([0.5, 0.5, 0.0], [0.25, 0.25, 0.5])),
        write_exp(tmp_path, "q.json", ([0.45, 0.45, 0.1], [0.275, 0.275, 0.45])),
    )
    code, out, _ = run(capsys, "search", p, q)
    assert code == 0
    assert json.loads(out)["n_found"] == 1
    code, out, _ = run(capsys, "search", p, q, "--kind", "catalytic")
    assert code == 0
    assert json.loads(out)["n_found"] == 0
    full = write_exp(tmp_path, "full.json", ([0.6, 0.4], [0.3, 0.7]))
    delta = write_exp(tmp_path, "delta.json", ([1.0, 0.0], [0.3, 0.7]))
    code, out, _ = run(capsys, "search", full, delta, "--n-max", "3")
    assert code == 1
    payload = json.loads(out)
    assert payload["n_found"] is None and payload["checked_up_to"] == 3


def test_thermal_exit_codes(tmp_path, capsys):
    def instance(name, rho, sigma):
        path = tmp_path / name
        path.write_text(
            canonical_json(
                {
                    "energies": [1.0, 2.0],
                    "beta": math.log(2.0),
                    "rho": rho,
                    "sigma": sigma,
                }
            )
        )
        return str(path)

    relax = instance("relax.json", [0.95, 0.05], [0.8, 0.2])
    code, out, _ = run(capsys, "thermal", relax)
    assert code == 0 and json.loads(out)["answer"] == "YES"
    heat = instance("heat.json", [0.8, 0.2], [0.95, 0.05])
    assert run(capsys, "thermal", heat)[0] == 1


def test_classify(tmp_path, capsys):
    star = write_exp(
        tmp_path, "star.json", ([0.5, 0.5, 0.0], [0.5, 0.0, 0.5])
    )
    code, out, _ = run(capsys, "classify", star)
    assert code == 0
    assert json.loads(out)["is_power_universal"] is True


# -- error paths --------------------------------------------------------------------


def test_usage_errors(capsys):
    assert run(capsys, "no-such-command")[0] == 64
    assert run(capsys, "certify")[0] == 64
    assert run(capsys, "certify", "a", "b", "--regime", "bogus")[0] == 64


def test_data_errors(pair, tmp_path, capsys):
    p, q = pair
    code, _, err = run(capsys, "check-exact", p, str(tmp_path / "absent.json"))
    assert code == 65 and "majorize:" in err
    # crossing supports are not a dichotomy, so the forced regime must refuse
    crossing = write_exp(
        tmp_path, "crossing.json", ([0.5, 0.5, 0.0], [0.5, 0.0, 0.5])
    )
    code, _, err = run(
        capsys, "certify", crossing, crossing, "--regime", "dichotomy"
    )
    assert code == 65
    # the general-dichotomy certifier only has an asymptotic form
    assert run(capsys, "certify", p, q, "--regime", "general-dichotomy")[0] == 65
    bad = tmp_path / "bad.json"
    bad.write_text('{"columns": [[0.5, -0.5]]}\n')
    assert run(capsys, "check-exact", str(bad), q)[0] == 65


def test_divergence_pair_out_of_range(pair, capsys):
    p, _ = pair
    assert run(capsys, "divergence", p, "--pair", "0", "5")[0] == 65


# -- divergence tables ----------------------------------------------------------------


def test_divergence_matches_the_library(pair, capsys):
    p_path, _ = pair
    code, out, _ = run(
        capsys, "divergence", p_path, "--alphas", "0.5,1,2,inf"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "alpha,value"
    p = Experiment(([0.5, 0.5, 0.0], [0.25, 0.25, 0.5]))
    for line, a in zip(lines[1:], (0.5, 1.0, 2.0, math.inf)):
        cells = line.split(",")
        assert cells[0] == format_float(a)
        assert cells[1] == format_float(renyi(p.column(0), p.column(1), a))


def test_divergence_margin_table(pair, capsys):
    p, q = pair
    code, out, _ = run(capsys, "divergence", p, q, "--alphas", "0.5,2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "alpha,value_p,value_q,margin"
    for line in lines[1:]:
        _, vp, vq, margin = line.split(",")
        assert float(vp) - float(vq) == pytest.approx(float(margin), abs=1e-15)


def test_divergence_multivar_family(pair, capsys):
    p, _ = pair
    code, out, _ = run(capsys, "divergence", p, "--family", "multivar")
    assert code == 0
    alphas = [float(line.split(",")[0]) for line in out.strip().split("\n")[1:]]
    assert all(0.0 < a < 1.0 for a in alphas)


# -- determinism and file output --------------------------------------------------


def test_repeated_runs_are_byte_identical(pair, tmp_path, capsys):
    p, q = pair
    first, second = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert run(capsys, "certify", p, q, "--output", first)[0] == 0
    assert run(capsys, "certify", p, q, "--output", second)[0] == 0
    a, b = open(first, "rb").read(), open(second, "rb").read()
    assert a and a == b


def test_output_flag_redirects_stdout(pair, tmp_path, capsys):
    p, q = pair
    out_path = tmp_path / "result.json"
    code, out, _ = run(capsys, "check-exact", p, q, "--output", str(out_path))
    assert code == 0
    assert out == ""
    assert json.loads(out_path.read_text())["feasible"] is True


# -- figures ---------------------------------------------------------------------


def test_certify_plot_writes_png(pair, tmp_path, capsys):
    p, q = pair
    png = tmp_path / "margins.png"
    code, _, _ = run(capsys, "certify", p, q, "--plot", str(png))
    assert code == 0
    assert png.read_bytes().startswith(PNG_MAGIC)


def test_divergence_plot_writes_png(pair, tmp_path, capsys):
    p, q = pair
    png = tmp_path / "curves.png"
    code, out, _ = run(
        capsys, "divergence", p, q, "--alphas", "0,0.5,1,2,inf",
        "--plot", str(png),
    )
    assert code == 0
    assert png.read_bytes().startswith(PNG_MAGIC)
    assert out.startswith("alpha,")  # the table still lands on stdout
