import json
import subprocess
import sys

import numpy as np
import pytest

from measuregraph.cli import main
from measuregraph.graph_generation import LabeledGraph

SUBCOMMANDS = ["generate", "verify", "degree-dist", "sobol", "spectral", "primes", "spin", "estimate", "bn", "nn"]
MODEL_SUBCOMMANDS = ["generate", "verify", "degree-dist", "sobol", "spectral", "estimate"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_tsv(text):
    lines = [l.split("\t") for l in text.strip().splitlines()]
    return lines[0], lines[1:]


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "measuregraph", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "generate" in res.stdout


@pytest.mark.parametrize("cmd", MODEL_SUBCOMMANDS)
@pytest.mark.parametrize("bad", ['{"kappa": {"kind": "poisson", "mean": 3}}', '{"kappa": 1, "nu": {}, "transform": {}}', "not json"])
def test_model_schema_failure(cmd, bad, tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(bad)
    code, _, err = run([cmd, "--spec", str(path), "--seed", "1"], capsys)
    assert code == 2
    assert "invalid input" in err


@pytest.mark.parametrize("argv", [
    ["primes", "--nu", "uniform"],
    ["primes", "--s-grid", "4:1:0.1"],
    ["spin", "--sites", "0"],
    ["spin", "--spin", "gamma:1"],
    ["bn", "--q", "0"],
    ["bn", "--data", "/nonexistent.csv"],
    ["nn", "--layers", "0"],
    ["nn", "--layers", "2", "--probs", "0.5,0.5"],
])
def test_application_validation_failure(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "invalid input" in err


def test_bad_inline_flags(capsys):
    code, _, _ = run(["generate", "--kappa", "poisson:-1", "--seed", "1"], capsys)
    assert code == 2
    code, _, _ = run(["generate", "--transform", "bernoulli:constant:1.5", "--seed", "1"], capsys)
    assert code == 2


def test_generate_complete_graph(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, summary, _ = run(["generate", "--kappa", "dirac:10", "--transform", "bernoulli:constant:1",
                            "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    header, rows = read_tsv(summary)
    assert header == ["file", "seed", "vertices", "active_edges", "total_weight"]
    assert rows[0][2:4] == ["10", "45"]
    g = LabeledGraph.from_json(out.read_text())
    assert g.n_vertices == 10


def test_generate_reps_and_edgelist(tmp_path, capsys):
    code, summary, _ = run(["generate", "--reps", "100", "--seed", "7", "--out", str(tmp_path / "d")], capsys)
    assert code == 0
    files = sorted(p.name for p in (tmp_path / "d").iterdir())
    assert files == sorted(f"graph_{s}.json" for s in range(7, 107))
    code, text, _ = run(["generate", "--kappa", "dirac:4", "--transform", "bernoulli:constant:1",
                         "--seed", "0", "--format", "edgelist"], capsys)
    assert code == 0 and len([l for l in text.splitlines() if l and not l.startswith("#")]) >= 6


def test_generate_requires_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate"])
    assert exc.value.code == 2


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(["generate", "--kappa", "poisson:20", "--transform", "poisson:powerlaw:1", "--seed", "3", "--out", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_verify_pass_and_zero(capsys):
    code, out, _ = run(["verify", "--kappa", "dirac:10", "--reps", "10000", "--seed", "1"], capsys)
    assert code == 0
    header, rows = read_tsv(out)
    assert header == ["quantity", "analytic", "mc_mean", "mc_stderr", "z"]
    assert all(abs(float(r[4])) <= 4 for r in rows)
    code, out, _ = run(["verify", "--transform", "bernoulli:constant:0", "--reps", "100", "--format", "json"], capsys)
    assert code == 0
    assert all(r["analytic"] == 0 and r["mc_mean"] == 0 for r in json.loads(out))


def test_verify_divergence_exits_one(capsys):
    code, _, err = run(["verify", "--kappa", "dirac:10", "--reps", "2000", "--threshold", "0"], capsys)
    assert code == 1 and "divergent" in err


def test_dot_product_analytic_column(capsys):
    c, a = 10.0, 1.0
    code, out, _ = run(["verify", "--kappa", f"poisson:{c}", "--nu", "cube:2", "--transform", "bernoulli:dotproduct:1:2",
                        "--reps", "4000", "--quantities", "edge_count", "--format", "json"], capsys)
    assert code == 0
    # poisson: c^2 + delta^2 - c = c^2, so only the product-measure term survives
    assert json.loads(out)[0]["analytic"] == pytest.approx(c**2 / (a + 1) ** 2, rel=1e-3)


def test_generate_then_verify_and_estimate(tmp_path, capsys):
    d = tmp_path / "graphs"
    run(["generate", "--kappa", "poisson:20", "--transform", "bernoulli:powerlaw:1", "--reps", "300",
         "--seed", "0", "--out", str(d)], capsys)
    files = sorted(str(p) for p in d.iterdir())
    code, out, _ = run(["verify", "--kappa", "poisson:20", "--transform", "bernoulli:powerlaw:1", "--graphs", *files], capsys)
    assert code == 0
    code, out, _ = run(["estimate", "--kappa", "poisson:20", "--transform", "bernoulli:powerlaw:1", "--graphs", *files[:5],
                        "--iters", "50", "--seed", "1"], capsys)
    assert code == 0
    res = json.loads(out)
    assert res["vertex_counts"] == [LabeledGraph.from_json(open(f).read()).n_vertices for f in files[:5]]
    assert len(res["trace"]["thetas"]) == 51


def test_degree_dist_binomial(capsys):
    code, out, _ = run(["degree-dist", "--kappa", "dirac:5", "--transform", "bernoulli:constant:0.5", "--kmax", "4"], capsys)
    assert code == 0
    _, rows = read_tsv(out)
    probs = np.array([float(r[1]) for r in rows])
    assert np.allclose(probs, [1 / 16, 4 / 16, 6 / 16, 4 / 16, 1 / 16], atol=1e-12)


def test_sobol_constant_kernel_ed_zero(capsys):
    code, out, _ = run(["sobol", "--transform", "bernoulli:constant:0.3"], capsys)
    assert code == 0
    header, rows = read_tsv(out)
    assert float(rows[0][header.index("ED")]) == 0.0


def test_spectral_rank_one(capsys):
    code, out, _ = run(["spectral", "--kernel", "exponential:1", "--rank", "2"], capsys)
    assert code == 0
    _, rows = read_tsv(out)
    assert float(rows[0][1]) == pytest.approx((1 - np.exp(-2)) / 2, rel=1e-10)
    assert abs(float(rows[1][1])) < 1e-12


def test_primes_table_and_figure(tmp_path, capsys):
    fig = tmp_path / "primes.png"
    code, out, err = run(["primes", "--nu", "zeta", "--s-grid", "1.1:4:0.01", "--figure", str(fig)], capsys)
    assert code == 0
    header, rows = read_tsv(out)
    assert header[:3] == ["s", "prime_density", "edge_density"]
    assert len(rows) == 291
    best = max(rows, key=lambda r: float(r[1]))
    assert float(best[0]) == pytest.approx(1.49, abs=0.006) and float(best[1]) == pytest.approx(0.325236, abs=1e-4)
    assert "1.4910" in err
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_spin_routes_agree(capsys):
    code, out, _ = run(["spin", "--sites", "4", "--spin", "binomial:2:0.4", "--beta-grid", "0:2:0.5"], capsys)
    assert code == 0
    _, rows = read_tsv(out)
    for r in rows:
        assert float(r[1]) == pytest.approx(float(r[2]), abs=1e-12)
    code, _, _ = run(["spin", "--sites", "21", "--spin", "bernoulli:0.5"], capsys)
    assert code == 4


def test_bn_and_nn(tmp_path, capsys):
    csv = tmp_path / "d.csv"
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, 400)
    csv.write_text("a,b\n" + "\n".join(f"{v},{v}" for v in x))
    code, out, _ = run(["bn", "--data", str(csv), "--iters", "100", "--exhaustive"], capsys)
    assert code == 0
    res = json.loads(out)
    assert np.asarray(res["best_adjacency"]).sum() == 1
    code, out, _ = run(["nn", "--layers", "2", "--layer-weights", "1,1", "--probs", "1", "--kappa", "dirac:4"], capsys)
    assert code == 0
    assert json.loads(out)["expected_edges"] == pytest.approx(3.0)


def test_figures_are_pngs(tmp_path, capsys):
    for argv in (["generate", "--seed", "1"], ["degree-dist"], ["sobol"], ["bn", "--iters", "20"]):
        fig = tmp_path / f"{argv[0]}.png"
        code, _, _ = run(argv + ["--figure", str(fig)], capsys)
        assert code == 0
        assert fig.read_bytes()[:4] == b"\x89PNG"
