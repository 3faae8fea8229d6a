import io
import json
import shutil
import sys

import numpy as np
import pytest

from xlgap import cli
from xlgap.data import load_embeddings, load_probabilities, load_scores
from xlgap.gaps import linear_cka, rpd
from xlgap.phonemizer import bundled_tables
from xlgap.report import bundled_toy_dir
from xlgap.transport import SinkhornConfig, sinkhorn

TOY = bundled_toy_dir()
RULES = TOY.parent / "rules"


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestScores:
    def test_rpd_single_pair(self, capsys):
        code, out, err = run(["rpd", "eng=75.02", "urd=56.55"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["pair"] == ["eng", "urd"]
        assert obj["rpd"] == rpd(75.02, 56.55)
        assert "28.08" in err

    def test_rpd_many_and_quiet(self, capsys):
        code, out, err = run(["rpd", "a=1", "b=2", "c=3", "--quiet"], capsys)
        assert code == 0 and err == ""
        assert len(json.loads(out)["pairs"]) == 3

    @pytest.mark.parametrize("argv", [["rpd", "eng=1"], ["rpd", "eng:1", "fra=2"], ["rpd", "eng=x", "fra=2"]])
    def test_rpd_usage(self, argv, capsys):
        assert run(argv, capsys)[0] == 1

    def test_rpd_domain(self, capsys):
        assert run(["rpd", "eng=0", "fra=0"], capsys)[0] == 2

    def test_spread(self, tmp_path, capsys):
        p = write(tmp_path / "s.json", '{"eng":80.80,"swa":62.93,"urd":61.57}')
        code, out, _ = run(["spread", p], capsys)
        obj = json.loads(out)
        assert code == 0 and obj["n"] == 3
        assert set(obj) == {"std", "mean_rpd", "n"}

    def test_spread_bad_json(self, tmp_path, capsys):
        assert run(["spread", write(tmp_path / "s.json", "{")], capsys)[0] == 2


def test_unknown_command_and_missing_args(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["sinkhorn", "--epsilon", "0", "a", "b"])
    assert exc.value.code == 1


class TestCKA:
    def test_toy_files(self, tmp_path, capsys):
        files = [TOY / "tka.emb.csv", TOY / "mlo.emb.csv", TOY / "zeb.emb.bin"]
        code, out, _ = run(["cka", *files, "--heatmap", tmp_path / "h.csv", "--out", tmp_path / "c.json"], capsys)
        assert code == 0 and out == ""
        obj = json.loads((tmp_path / "c.json").read_text())
        assert obj["languages"] == ["tka", "mlo", "zeb"]
        m = [load_embeddings(f).matrix for f in files]
        assert obj["cka"][0][2] == linear_cka(m[0], m[2])
        assert len((tmp_path / "h.csv").read_text().splitlines()) == 4

    def test_mismatched_rows(self, tmp_path, capsys):
        a = write(tmp_path / "a.csv", "lang=eng,n=2,d=1\n1\n2\n")
        b = write(tmp_path / "b.csv", "lang=fra,n=3,d=1\n1\n2\n4\n")
        code, _, err = run(["cka", a, b], capsys)
        assert code == 2 and "fra" in err


class TestSinkhorn:
    def test_toy_pair(self, capsys):
        code, out, _ = run(["sinkhorn", TOY / "tka.prob.csv", TOY / "mlo.prob.csv", "--epsilon", "0.01"], capsys)
        obj = json.loads(out)
        assert code == 0 and obj["converged"]
        ref = sinkhorn(load_probabilities(TOY / "tka.prob.csv"), load_probabilities(TOY / "mlo.prob.csv"),
                       SinkhornConfig(epsilon=0.01))
        assert obj["distance"] == ref.cost
        assert obj["pair"] == ["tka", "mlo"]

    def test_strict_non_convergence(self, capsys):
        argv = ["sinkhorn", TOY / "tka.prob.csv", TOY / "mlo.prob.csv", "--epsilon", "1e-4", "--max-iters", "2"]
        code, out, _ = run(argv, capsys)
        assert code == 0 and json.loads(out)["converged"] is False
        code, _, err = run([*argv, "--strict"], capsys)
        assert code == 3 and "converge" in err


class TestCorr:
    def test_spearman_exact(self, tmp_path, capsys):
        p = write(tmp_path / "c.csv", "x,y\n1,10\n2,20\n3,30\n4,40\n")
        code, out, _ = run(["corr", p], capsys)
        obj = json.loads(out)
        assert code == 0
        assert obj["coefficient"] == pytest.approx(1.0, abs=1e-15) and obj["p_value"] == pytest.approx(2 / 24)
        assert obj["p_method"] == "exact_permutation"

    def test_kendall_asymptotic(self, tmp_path, capsys):
        p = write(tmp_path / "c.csv", "1,2\n2,1\n3,4\n4,3\n5,6\n")
        code, out, _ = run(["corr", p, "--method", "kendall", "--p-method", "asymptotic"], capsys)
        obj = json.loads(out)
        assert code == 0 and obj["method"] == "kendall_tau_b" and obj["p_method"] == "asymptotic"

    def test_bad_rows(self, tmp_path, capsys):
        assert run(["corr", write(tmp_path / "c.csv", "1,2\n2,x\n")], capsys)[0] == 2
        assert run(["corr", write(tmp_path / "d.csv", "1,2,3\n2,3,4\n")], capsys)[0] == 2
        assert run(["corr", write(tmp_path / "e.csv", "1,2\n2,2\n3,2\n")], capsys)[0] == 2


class TestDivergence:
    @pytest.fixture
    def samples(self, tmp_path, rng):
        xa, xb = rng.normal(size=(20, 1)), rng.normal(0.8, 1, size=(20, 1))
        for name, x in (("a.csv", xa), ("b.csv", xb)):
            rows = [f"{float(v[0])!r},{int(v[0] <= 0.3)}" for v in x]
            write(tmp_path / name, "\n".join(rows) + "\n")
        return tmp_path / "a.csv", tmp_path / "b.csv"

    def test_bound(self, samples, capsys):
        code, out, _ = run(["bound", *samples, "--threshold", "0.0"], capsys)
        obj = json.loads(out)
        assert code == 0
        assert set(obj) == {"h_div", "hdh_div", "complexity", "bound", "gap", "holds"}
        assert obj["holds"] is True

    def test_hdiv_labeled(self, samples, capsys):
        code, out, _ = run(["hdiv", *samples, "--labeled"], capsys)
        obj = json.loads(out)
        assert code == 0 and 0 <= obj["h_div"] <= obj["hdh_div"] <= 2

    def test_budget_exceeded(self, samples, capsys):
        assert run(["hdiv", *samples, "--labeled", "--budget", "10"], capsys)[0] == 2

    def test_non_binary_labels(self, tmp_path, capsys):
        p = write(tmp_path / "a.csv", "0.1,2\n0.2,0\n")
        assert run(["bound", p, p, "--threshold", "0"], capsys)[0] == 2


class TestPhonemize:
    def test_stdin_lines(self, capsys, monkeypatch):
        argv = ["phonemize", "--rules", RULES / "demo.tsv", "--inventory", RULES / "demo.inv"]
        code, out, _ = run(argv, capsys, stdin="ce ca phase\nship\n", monkeypatch=monkeypatch)
        assert code == 0
        assert out == "s e k a f a s e\nʃ i p\n"

    def test_every_bundled_table_loads(self, capsys, monkeypatch):
        for name in bundled_tables():
            argv = ["phonemize", "--rules", RULES / f"{name}.tsv", "--inventory", RULES / f"{name}.inv"]
            assert run(argv, capsys, stdin="", monkeypatch=monkeypatch)[0] == 0

    def test_conversion_failure_and_passthrough(self, capsys, monkeypatch):
        argv = ["phonemize", "--rules", RULES / "demo.tsv", "--inventory", RULES / "demo.inv"]
        code, _, err = run(argv, capsys, stdin="a!b\n", monkeypatch=monkeypatch)
        assert code == 2 and "1" in err
        code, out, _ = run([*argv, "--passthrough"], capsys, stdin="a!b\n", monkeypatch=monkeypatch)
        assert code == 0 and out == "a ! b\n"


class TestReport:
    def test_toy_report(self, tmp_path, capsys):
        out, heat = tmp_path / "r.json", tmp_path / "h.csv"
        code, _, err = run(["report", TOY, "--out", out, "--heatmap", heat], capsys)
        assert code == 0 and "3 languages" in err
        obj = json.loads(out.read_text())
        assert obj["languages"] == ["tka", "mlo", "zeb"]
        for key in ("rpd", "cka", "sinkhorn"):
            assert np.array(obj[key]).shape == (3, 3)
        scores = load_scores(TOY / "scores.json")
        assert obj["rpd"][0][1] == rpd(scores["tka"], scores["mlo"])
        emb = {lang: load_embeddings(next(TOY.glob(f"{lang}.emb.*"))).matrix for lang in obj["languages"]}
        assert obj["cka"][1][2] == linear_cka(emb["mlo"], emb["zeb"])
        rows = heat.read_text().splitlines()
        assert rows[0] == "lang_i,lang_j,cka" and len(rows) == 4
        assert rows[1] == f"tka,mlo,{linear_cka(emb['tka'], emb['mlo']):.6g}"

    def test_no_partial_output_on_error(self, tmp_path, capsys):
        d = tmp_path / "data"
        shutil.copytree(TOY, d)
        write(d / "mlo.emb.csv", "lang=mlo,n=12,d=4\n1,2,3\n")
        out = tmp_path / "r.json"
        code, _, _ = run(["report", d, "--out", out, "--heatmap", tmp_path / "h.csv"], capsys)
        assert code == 2
        assert list(tmp_path.iterdir()) == [d]

    def test_missing_directory(self, tmp_path, capsys):
        assert run(["report", tmp_path / "nope", "--out", tmp_path / "r.json"], capsys)[0] == 2
