import json

import numpy as np
import pytest
from click.testing import CliRunner

from loopoid_lab.cli import main
from loopoid_lab.errors import SchemaError
from loopoid_lab.specio import (
    build_loop,
    build_loopoid,
    build_system,
    canonical_json,
    parse_spec,
    write_csv,
)

H_TERMS = [
    [[1.0, [1, 0], [0, 0]], [1.0, [0, 0], [1, 0]], [1.0, [1, 0], [0, 1]]],
    [[1.0, [0, 1], [0, 0]], [1.0, [0, 0], [0, 1]], [1.0, [0, 1], [1, 0]]],
]

H_LOOP_BODY = {"dim": 2, "mul": {"kind": "polynomial", "terms": H_TERMS}}
PRODUCT_BODY = {"kind": "product", "pair_dim": 2, "loop": H_LOOP_BODY}
SYSTEM_BODY = {
    "loopoid": PRODUCT_BODY,
    "lagrangian": {"kind": "half_sum_squares"},
    "start": [1.0, 2.0, 0.7, -0.4, 0.5, 1.3],
}


def spec_text(kind, body, seed=0):
    return json.dumps({"kind": kind, "seed": seed, "body": body})


# ---------------------------------------------------------------------------
# parsing and canonical output
# ---------------------------------------------------------------------------


def test_parse_round_trip_canonical():
    text = spec_text("loopoid", PRODUCT_BODY)
    spec = parse_spec(text)
    again = parse_spec(canonical_json(spec.to_dict()))
    assert canonical_json(spec.to_dict()) == canonical_json(again.to_dict())


def test_missing_dim_reports_path():
    body = {"mul": {"kind": "polynomial", "terms": [[]]}}
    with pytest.raises(SchemaError) as err:
        parse_spec(spec_text("loop", body))
    assert err.value.path == "$.body.dim"


def test_non_integer_exponent_reports_path():
    body = {"dim": 1, "mul": {"kind": "polynomial", "terms": [[[1.0, [0.5], [1]]]]}}
    with pytest.raises(SchemaError) as err:
        parse_spec(spec_text("loop", body))
    assert "exponents" in str(err.value)


def test_unknown_kind_rejected():
    with pytest.raises(SchemaError):
        parse_spec(json.dumps({"kind": "mystery", "body": {}}))
    with pytest.raises(SchemaError):
        parse_spec("not json")


def test_canonical_json_is_stable_and_17_digits():
    payload = {"b": 1 / 3, "a": [True, None, 2]}
    text = canonical_json(payload)
    assert text == '{"a":[true,null,2],"b":0.33333333333333331}\n'


def test_write_csv_format():
    text = write_csv(("i", "value"), [(1, 0.5), (2, 1.0 / 3.0)])
    lines = text.split("\n")
    assert lines[0] == "i,value"
    assert lines[1] == "1,0.5"
    assert lines[2] == "2,0.33333333333333331"
    assert text.endswith("\n") and "\r" not in text


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def test_build_loop_polynomial_matches_values(rng):
    chart = build_loop(H_LOOP_BODY)
    x = rng.normal(size=2)
    y = rng.normal(size=2)
    from loopoid_lab.loops import eval_mul

    expected = np.array(
        [x[0] + y[0] + x[0] * y[1], x[1] + y[1] + x[1] * y[0]]
    )
    assert np.allclose(eval_mul(chart, x, y), expected, atol=1e-14)


def test_build_loopoid_kinds():
    assert build_loopoid(PRODUCT_BODY).dim_g == 6
    assert build_loopoid({"kind": "pair_groupoid", "dim": 3}).dim_g == 6
    phi = build_loopoid({"kind": "phi", "phi": {"odd_coeffs": [1.0, 1.0]}})
    assert phi.dim_g == 3 and phi.inverse_side == "left"
    pro = build_loopoid(
        {
            "kind": "prolongation",
            "base": PRODUCT_BODY,
            "fibration": {"dim_total": 3, "dim_base": 2},
        }
    )
    assert pro.dim_g == 6 + 2 and pro.dim_m == 3


def test_build_system_runs_a_step():
    from loopoid_lab.mechanics import step_solve

    system = build_system(SYSTEM_BODY)
    h = step_solve(system, np.asarray(SYSTEM_BODY["start"]))
    assert abs(h[0] - (1 + np.sqrt(21)) / 2) < 1e-8


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


@pytest.fixture
def runner():
    return CliRunner()


def _write(tmp_path, name, kind, body):
    p = tmp_path / name
    p.write_text(spec_text(kind, body), encoding="utf-8")
    return str(p)


def test_cli_verify_finite(runner, tmp_path):
    path = _write(
        tmp_path,
        "z4t.json",
        "finite",
        {
            "kind": "transversal",
            "group": {"order": 4, "unit": 0, "table": [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]]},
            "subgroup": [0, 2],
            "transversal": [0, 1],
        },
    )
    result = runner.invoke(main, ["verify-finite", "--spec", path])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["ok"]
    assert report["report"]["left_inverse_property"]
    assert all("ref" in c for c in report["checks"])


def test_cli_octonion_suite(runner):
    result = runner.invoke(main, ["octonion", "--samples", "500", "--mul", "e1", "e2"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["ok"]
    assert report["product"]["result_expression"] == "1e3"


def test_cli_loop_algebra_csv(runner, tmp_path):
    path = _write(tmp_path, "h.json", "loop", H_LOOP_BODY)
    csv_path = tmp_path / "skew.csv"
    result = runner.invoke(
        main, ["loop-algebra", "--spec", path, "--csv", str(csv_path), "--out", str(tmp_path / "r.json")]
    )
    assert result.exit_code == 0, result.output
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "i,j,k,value"
    rows = {tuple(l.split(",")[:3]): float(l.split(",")[3]) for l in lines[1:]}
    assert abs(rows[("1", "2", "1")] - 1.0) < 1e-6
    assert abs(rows[("1", "2", "2")] + 1.0) < 1e-6


def test_cli_loopoid_check_product_and_phi(runner, tmp_path):
    path = _write(tmp_path, "prod.json", "loopoid", PRODUCT_BODY)
    result = runner.invoke(main, ["loopoid-check", "--spec", path, "--samples", "8"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["report"]["is_loopoid"]

    phi_path = _write(tmp_path, "phi.json", "loopoid", {"kind": "phi", "phi": {"odd_coeffs": [1.0, 1.0]}})
    result = runner.invoke(main, ["loopoid-check", "--spec", phi_path, "--samples", "8"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert not report["report"]["is_loopoid"]
    assert report["report"]["left_ip_residual"] < 1e-8


def test_cli_lie_functor(runner, tmp_path):
    body = {"kind": "product", "pair_dim": 1, "loop": H_LOOP_BODY}
    path = _write(tmp_path, "prod1.json", "loopoid", body)
    csv_path = tmp_path / "brackets.csv"
    result = runner.invoke(main, ["lie-functor", "--spec", path, "--csv", str(csv_path)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["almost_lie_residual"] < 1e-6
    rows = {}
    for line in csv_path.read_text().strip().split("\n")[1:]:
        i, j, k, v = line.split(",")
        rows[(i, j, k)] = float(v)
    assert abs(rows[("1", "2", "1")] - 1.0) < 1e-6
    assert abs(rows[("1", "2", "2")] + 1.0) < 1e-6


def test_cli_lie_functor_algebroid_chart(runner, tmp_path):
    c = np.zeros((2, 2, 2))
    c[0, 0, 1] = 1.0
    c[0, 1, 0] = -1.0
    body = {
        "kind": "constant",
        "base_dim": 0,
        "rank": 2,
        "c": c.tolist(),
        "rho": np.zeros((0, 2)).tolist(),
    }
    path = _write(tmp_path, "alg.json", "algebroid", body)
    result = runner.invoke(main, ["lie-functor", "--spec", path])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["ok"]
    assert report["almost_lie_residual"] < 1e-9
    assert report["leibniz_residual"] < 1e-6


def test_cli_tangent_check(runner, tmp_path):
    path = _write(tmp_path, "prod.json", "loopoid", PRODUCT_BODY)
    result = runner.invoke(main, ["tangent-check", "--spec", path, "--samples", "3"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["ok"]


def test_cli_simulate_matches_surd(runner, tmp_path):
    path = _write(tmp_path, "sys.json", "system", SYSTEM_BODY)
    csv_path = tmp_path / "traj.csv"
    result = runner.invoke(
        main,
        ["simulate", "--spec", path, "--steps", "2", "--out", str(csv_path), "--report", str(tmp_path / "r.json")],
    )
    assert result.exit_code == 0, result.output
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0].startswith("step,x1")
    row1 = [float(v) for v in lines[2].split(",")]
    assert row1[0] == 1
    assert abs(row1[1] - (1 + np.sqrt(21)) / 2) < 1e-7
    assert abs(row1[2] - (np.sqrt(21) - 3) / 2) < 1e-7


def test_cli_legendre(runner, tmp_path):
    path = _write(tmp_path, "sys.json", "system", SYSTEM_BODY)
    result = runner.invoke(main, ["legendre", "--spec", path, "--at", "0.3,-0.8,0.2,1.1,-0.4,0.9"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["regular"]
    assert np.allclose(report["plus"], [0.94, -0.71, -0.4, 0.9], atol=1e-7)
    assert np.allclose(report["minus"], [0.06, -1.04, 0.2, 1.1], atol=1e-7)


def test_cli_schema_error_is_machine_readable(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(spec_text("loop", {"mul": {"kind": "polynomial", "terms": [[]]}}))
    result = runner.invoke(main, ["loop-algebra", "--spec", str(path)])
    assert result.exit_code == 2
    err = json.loads(result.output)
    assert err["error"]["type"] == "SchemaError"
    assert "$.body.dim" in err["error"]["message"]


def test_cli_deterministic_reports(runner, tmp_path):
    path = _write(tmp_path, "prod.json", "loopoid", PRODUCT_BODY)
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        result = runner.invoke(
            main, ["loopoid-check", "--spec", path, "--samples", "6", "--seed", "11", "--out", str(out)]
        )
        assert result.exit_code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_env_seed_fallback(runner, monkeypatch):
    monkeypatch.setenv("LOOPOID_LAB_SEED", "7")
    r1 = runner.invoke(main, ["octonion", "--samples", "200"])
    r2 = runner.invoke(main, ["octonion", "--samples", "200"])
    assert r1.exit_code == 0 and r1.output == r2.output
    assert json.loads(r1.output)["seed"] == 7
