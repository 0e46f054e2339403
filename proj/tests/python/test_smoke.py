import json
import math
import os
import subprocess

import numpy as np
import pytest

import tabebm


def test_energy_and_gradient():
    ds = tabebm.toy.two_moons(40, 0.1, 3)
    pre = tabebm.Preprocessor.fit(ds).apply(ds, True)
    ebms = tabebm.fit_class_ebms(pre)
    assert len(ebms) == 2
    x = np.array([0.2, -0.1])
    g = np.array(ebms[0].energy_gradient(x))
    fd = np.zeros(2)
    for d in range(2):
        step = np.zeros(2)
        step[d] = 1e-5
        fd[d] = (ebms[0].energy(x + step) - ebms[0].energy(x - step)) / 2e-5
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-8)
    f0, f1 = ebms[0].logits(x)
    assert ebms[0].energy(x) == pytest.approx(-math.log(math.exp(f0) + math.exp(f1)))
    assert np.all(np.abs(ebms[0].negatives) > 0)


def test_generate_is_stratified_and_deterministic():
    ds = tabebm.toy.two_class_blobs(30, 3, 1)
    syn, prep = tabebm.synthesize(ds, total=101, seed=5, steps=20)
    again, _ = tabebm.synthesize(ds, total=101, seed=5, steps=20)
    assert len(syn) == 101
    assert syn.features.shape == (101, 3)
    assert np.bincount(syn.labels).tolist() == [51, 50]
    assert np.array_equal(syn.features, again.features)
    assert syn.metadata["class_counts"] == [51, 50]
    raw = tabebm.inverse_transform(prep, syn)
    assert raw.metadata["inverse_transformed"]


def test_metrics_and_report():
    x = np.linspace(-1, 1, 30)
    assert tabebm.inverse_kl(x, x) == 1.0
    stat, p = tabebm.ks_two_sample(x, x)
    assert stat == 0.0 and abs(p - 1.0) < 1e-9
    stat, p = tabebm.chi2_test(["a"] * 10, ["b"] * 10)
    assert stat == pytest.approx(20.0)
    assert p == pytest.approx(math.erfc(math.sqrt(10.0)))
    assert tabebm.dcr(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == 5.0
    assert tabebm.delta_presence(np.array([[0.0], [1.0]]), np.array([[0.0], [0.1]])) == 1.0

    ds = tabebm.toy.two_class_blobs(30, 2, 2)
    syn, prep = tabebm.synthesize(ds, total=60, steps=10)
    report = tabebm.fidelity_report(prep, ds, syn)
    assert 0.0 < report["inverse_kl"]["mean"] <= 1.0
    assert report["dcr_median"] >= 0.0


def test_harness_helpers():
    assert tabebm.balanced_accuracy([0, 0, 1, 1, 1], [0, 1, 1, 1, 0]) == pytest.approx(7 / 12)
    assert tabebm.adtm_normalize({"a": 0.6, "b": 0.8}) == {"a": 0.0, "b": 1.0}
    assert tabebm.allocate_class_counts([1 / 3, 1 / 3, 1 / 3], 500) == [167, 167, 166]
    summary = tabebm.run_experiment(tabebm.toy.two_class_blobs(60, 2, 4), sizes=[20], n_syn=40, repeats=1, steps=10)
    assert set(summary["adtm_aggregate"]) == {
        "knn/baseline",
        "knn/tabebm",
        "logistic_regression/baseline",
        "logistic_regression/tabebm",
    }


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(tabebm.DataError):
        tabebm.parse_csv("a,y\n1,k\n2,k\n", "y")
    ds = tabebm.toy.two_class_blobs(10, 2, 0)
    pre = tabebm.Preprocessor.fit(ds).apply(ds, True)
    ebms = tabebm.fit_class_ebms(pre)
    with pytest.raises(tabebm.EmptyRequest):
        tabebm.generate(ebms, pre, total=0)
    with pytest.raises(ValueError):
        tabebm.allocate_class_counts([0.5, 0.6], 10)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a,b,kind,label\n0.1,1,x,p\n0.2,2,y,q\n0.3,1,x,p\n0.9,3,y,q\n")
    ds = tabebm.load_csv(str(path), "label")
    assert ds.class_names == ["p", "q"]
    assert ds.categorical == [False, False, True]
    syn, _ = tabebm.synthesize(ds, total=8, steps=5)
    text = syn.to_csv()
    assert text.splitlines()[0] == "a,b,kind,label"
    assert len(text.splitlines()) == 9


@pytest.mark.skipif("TABEBM_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["TABEBM_CLI"]
    assert subprocess.run([cli, "generate", "--nope"], capture_output=True).returncode == 1
    data = tmp_path / "d.csv"
    data.write_text("a,label\n1,x\n2,y\n3,x\n4,y\n")
    out = tmp_path / "o.csv"
    ok = subprocess.run(
        [cli, "generate", "--input", str(data), "--label-col", "label", "--out", str(out), "--num-samples", "6"],
        capture_output=True,
    )
    assert ok.returncode == 0
    meta = json.loads((tmp_path / "o.csv.meta.json").read_text())
    assert meta["rows"] == 6
    bad = subprocess.run(
        [cli, "generate", "--input", str(data), "--label-col", "missing", "--out", str(out)], capture_output=True
    )
    assert bad.returncode == 2
