"""Acceptance gate: one test per published acceptance criterion.

Each test prints a single `criterion NN ...: PASS/FAIL` line with the measured
numbers before asserting, so `pytest -v` plus captured output double as the
acceptance report. Runtime budgets are enforced with a wall-clock check inside
each test rather than an external harness.
"""

import csv
import json
import os
import time

import numpy as np
import pytest

from conftest import make_blobs, make_noisy_xor, write_config, write_loans_csv
from creditworks import (
    CartParams,
    CdsTerms,
    ForestConfig,
    LogregConfig,
    apply_scaler,
    expected_loss,
    f1_from_precision_recall,
    fair_spread,
    fit_cart,
    fit_forest,
    fit_logreg,
    fit_scaler,
    lgd,
    loss_and_gradient,
    render_report,
    report,
    roc,
)
from creditworks.cli import main
from creditworks.dataset import DesignMatrix, split

# Published pricing-example rows: (pd, ead, lgd, el).
TABLE_ROWS = (
    (0.09, 18_330.0, 16_727.9, 1_505.52),
    (0.41, 11_222.7, 10_241.8, 4_199.14),
    (0.82, 20_403.9, 18_620.6, 15_268.9),
    (0.97, 37_936.2, 34_620.6, 33_581.9),
)


def _verdict(number, label, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} ({label}): {status} - {detail}")
    assert ok, f"criterion {number:02d} {label}: {detail}"


def _budget(number, label, started, limit):
    elapsed = time.monotonic() - started
    assert elapsed < limit, (
        f"criterion {number:02d} {label}: runtime {elapsed:.1f}s exceeds {limit}s"
    )


def test_criterion_01_expected_loss_identity():
    started = time.monotonic()
    errors = []
    for pd_value, ead_amount, lgd_amount, el_amount in TABLE_ROWS:
        recovery = 1.0 - lgd_amount / ead_amount
        got = expected_loss(pd_value, ead_amount, recovery)
        errors.append(abs(got - el_amount))
    worst = max(errors)
    _budget(1, "expected-loss identity", started, 1.0)
    _verdict(
        1,
        "expected-loss identity",
        worst <= 0.05,
        f"per-row |EL - pd*LGD| = {[round(e, 4) for e in errors]}, "
        f"worst {worst:.4f} vs tolerance 0.05 "
        "(row 4 publishes 33581.9 but 0.97 * 34620.6 = 33581.982)",
    )


def test_criterion_02_recovery_consistency():
    started = time.monotonic()
    ratios = []
    for _, ead_amount, lgd_amount, _ in TABLE_ROWS:
        recovery = 1.0 - lgd_amount / ead_amount
        ratios.append(lgd(ead_amount, recovery) / ead_amount)
    worst = max(abs(r - 0.9126) for r in ratios)
    _budget(2, "recovery consistency", started, 1.0)
    _verdict(
        2,
        "recovery consistency",
        worst <= 0.0005,
        f"LGD/EAD = {[round(r, 6) for r in ratios]}, worst |ratio-0.9126| = {worst:.6f}",
    )


def test_criterion_03_f1_reproduction():
    started = time.monotonic()
    value = f1_from_precision_recall(0.65, 0.95)
    _budget(3, "f1 reproduction", started, 1.0)
    _verdict(
        3,
        "f1 reproduction",
        round(value, 2) == 0.77,
        f"f1(0.65, 0.95) = {value:.10f}, rounds to {round(value, 2)}",
    )


def test_criterion_04_auc_oracle_equivalence():
    started = time.monotonic()
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 201))
        y = (rng.random(n) < rng.uniform(0.2, 0.8)).astype(np.int64)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        if rng.random() < 0.5:
            scores = rng.integers(0, 10, size=n) / 10.0
        else:
            scores = np.round(rng.random(n), 2)
        auc = roc(y, scores).auc
        pos = scores[y == 1]
        neg = scores[y == 0]
        conc = float((pos[:, None] > neg[None, :]).sum())
        ties = float((pos[:, None] == neg[None, :]).sum())
        mw = (conc + 0.5 * ties) / (len(pos) * len(neg))
        worst = max(worst, abs(auc - mw))
    _budget(4, "auc oracle equivalence", started, 30.0)
    _verdict(
        4,
        "auc oracle equivalence",
        worst <= 1e-12,
        f"1000 tie-heavy fixtures, worst |trapezoid - Mann-Whitney| = {worst:.2e}",
    )


def test_criterion_05_gradient_correctness():
    started = time.monotonic()
    rng = np.random.default_rng(505)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 51))
        d = int(rng.integers(1, 11))
        x = rng.normal(size=(n, d))
        y = (rng.random(n) < 0.5).astype(np.int64)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        w = rng.normal(scale=0.5, size=d)
        b = float(rng.normal(scale=0.5))
        l2 = float(rng.choice([0.0, 0.0, 0.1, 1.0]))
        _, grad_w, grad_b = loss_and_gradient(x, y, w, b, l2=l2)

        def loss_at(wv, bv):
            return loss_and_gradient(x, y, wv, bv, l2=l2)[0]

        fd = np.empty(d + 1)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd[j] = (loss_at(w + e, b) - loss_at(w - e, b)) / (2 * h)
        fd[d] = (loss_at(w, b + h) - loss_at(w, b - h)) / (2 * h)
        analytic = np.append(grad_w, grad_b)
        rel = np.abs(fd - analytic) / np.maximum.reduce(
            [np.abs(fd), np.abs(analytic), np.full(d + 1, 1e-8)]
        )
        worst = max(worst, float(rel.max()))
    _budget(5, "gradient correctness", started, 30.0)
    _verdict(
        5,
        "gradient correctness",
        worst < 1e-5,
        f"100 instances, worst per-component relative error = {worst:.2e}",
    )


def test_criterion_06_cart_train_fit():
    started = time.monotonic()
    rng = np.random.default_rng(606)
    x = rng.normal(size=(60, 4))
    y = (rng.random(60) < 0.5).astype(np.int64)
    y[0], y[1] = 0, 1
    tree = fit_cart(x, y, CartParams())
    y_pred = tree.classify(x)
    acc = float((y_pred == y).mean())
    text = render_report(report(y, y_pred))
    body = text.splitlines()[1:]
    cells = [t for line in body for t in line.split() if t.replace(".", "").isdigit()]
    all_ones = bool(cells) and all(c == "1.00" for c in cells)
    _budget(6, "cart train fit", started, 5.0)
    _verdict(
        6,
        "cart train fit",
        acc == 1.0 and all_ones,
        f"train accuracy {acc:.4f}; report cells {sorted(set(cells))}",
    )


def test_criterion_07_forest_beats_logreg_on_xor():
    started = time.monotonic()
    x, y = make_noisy_xor(n=2000, seed=707, flip=0.1)
    matrix = DesignMatrix(columns=("x0", "x1"), x=x, y=y)
    pair = split(matrix, 0.2, seed=707)

    scaler = fit_scaler(pair.train)
    train_s = apply_scaler(scaler, pair.train)
    test_s = apply_scaler(scaler, pair.test)
    lr = fit_logreg(train_s.x, train_s.y, LogregConfig(learning_rate=0.1, max_iters=500))
    lr_auc = roc(pair.test.y, lr.predict_proba(test_s.x)).auc

    config = ForestConfig(n_trees=30, params=CartParams(max_depth=8, feature_subsample="auto"), seed=707)
    rf = fit_forest(pair.train.x, pair.train.y, config)
    rf_auc = roc(pair.test.y, rf.predict_proba(pair.test.x)).auc

    _budget(7, "forest beats logreg on xor", started, 60.0)
    _verdict(
        7,
        "forest beats logreg on xor",
        rf_auc >= lr_auc + 0.05,
        f"forest AUC {rf_auc:.4f} vs logreg AUC {lr_auc:.4f} "
        f"(margin {rf_auc - lr_auc:.4f}, required 0.05)",
    )


def test_criterion_08_logistic_blob_sanity():
    started = time.monotonic()
    x, y = make_blobs(n_per_class=1000, seed=808)
    matrix = DesignMatrix(columns=("x0", "x1"), x=x, y=y)
    pair = split(matrix, 0.2, seed=808)
    scaler = fit_scaler(pair.train)
    train_s = apply_scaler(scaler, pair.train)
    test_s = apply_scaler(scaler, pair.test)
    model = fit_logreg(
        train_s.x, train_s.y, LogregConfig(learning_rate=0.1, max_iters=500, threshold=0.5)
    )
    labels = model.classify(test_s.x)
    acc = float((labels == pair.test.y).mean())
    boundary_is_inclusive = model.classify(np.zeros((1, 2)))[0] == 1
    _budget(8, "logistic blob sanity", started, 30.0)
    _verdict(
        8,
        "logistic blob sanity",
        acc >= 0.99 and boundary_is_inclusive,
        f"test accuracy {acc:.4f} on 400 held-out points "
        f"(p = 0.5 classifies as 1: {boundary_is_inclusive})",
    )


def test_criterion_09_cds_properties():
    started = time.monotonic()

    def terms(**kw):
        base = dict(notional=10_000.0, maturity=1.0, risk_free_rate=0.03,
                    pd=0.2, recovery_rate=0.4)
        base.update(kw)
        return CdsTerms(**base)

    zero_pd = fair_spread(terms(pd=0.0)).spread_per_annum
    full_recovery = fair_spread(terms(recovery_rate=1.0)).spread_per_annum

    grid = np.linspace(0.01, 0.99, 99)
    spreads = [fair_spread(terms(pd=float(p))).spread_per_annum for p in grid]
    strictly_increasing = all(b > a for a, b in zip(spreads, spreads[1:]))

    legs_ok = True
    worst_gap = 0.0
    rng = np.random.default_rng(909)
    for _ in range(25):
        quote = fair_spread(
            terms(
                pd=float(rng.uniform(0.01, 0.99)),
                recovery_rate=float(rng.uniform(0.0, 0.9)),
                maturity=float(rng.uniform(0.5, 5.0)),
                risk_free_rate=float(rng.uniform(0.0, 0.1)),
            )
        )
        scale = max(abs(quote.premium_leg_value), abs(quote.protection_leg_value))
        gap = abs(quote.premium_leg_value - quote.protection_leg_value) / scale
        worst_gap = max(worst_gap, gap)
        legs_ok = legs_ok and gap < 1e-9

    short = fair_spread(terms(maturity=1.0)).spread_per_annum
    long = fair_spread(terms(maturity=3.0)).spread_per_annum

    ok = (
        zero_pd == 0.0
        and full_recovery == 0.0
        and strictly_increasing
        and legs_ok
        and short > long
    )
    _budget(9, "cds properties", started, 5.0)
    _verdict(
        9,
        "cds properties",
        ok,
        f"spread(pd=0)={zero_pd}, spread(R=1)={full_recovery}, "
        f"strict pd-grid increase={strictly_increasing}, "
        f"worst leg imbalance={worst_gap:.2e}, 1y {short:.6f} > 3y {long:.6f}",
    )


def test_criterion_10_byte_determinism(tmp_path, monkeypatch):
    started = time.monotonic()
    monkeypatch.setenv("CREDITWORKS_CANONICAL", "1")
    write_loans_csv(tmp_path / "loans.csv")
    tracked = ["model.json", "training_log.json", "report.txt", "report.json",
               "roc.csv", "comparison.json"]
    stable = True
    detail = []
    for kind, model_cfg in (
        ("logreg", {"kind": "logreg", "learning_rate": 0.1, "max_iters": 300}),
        ("forest", {"kind": "forest", "n_trees": 5, "max_depth": 4}),
    ):
        write_config(tmp_path / "config.json", model=model_cfg)
        snapshots = []
        for _ in range(2):
            assert main(["train", "--config", str(tmp_path / "config.json")]) == 0
            assert main(["evaluate", "--config", str(tmp_path / "config.json")]) == 0
            out = tmp_path / "out"
            snapshots.append({name: (out / name).read_bytes() for name in tracked})
        same = [name for name in tracked if snapshots[0][name] == snapshots[1][name]]
        stable = stable and len(same) == len(tracked)
        detail.append(f"{kind}: {len(same)}/{len(tracked)} files byte-identical")
    _budget(10, "byte determinism", started, 60.0)
    _verdict(10, "byte determinism", stable, "; ".join(detail))


def test_criterion_11_reference_dataset_counts(tmp_path, monkeypatch):
    source = os.environ.get("CREDITWORKS_LENDING_CLUB_CSV")
    if not source:
        pytest.skip(
            "informational: set CREDITWORKS_LENDING_CLUB_CSV to an accepted-loans "
            "CSV to report the three screening threshold counts"
        )
    monkeypatch.setenv("CREDITWORKS_CANONICAL", "1")
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "input": source,
                "seed": 0,
                "allow_extra_columns": True,
                "out_dir": str(tmp_path / "out"),
            }
        ),
        encoding="utf-8",
    )
    code = main(["explore", "--config", str(config)])
    assert code == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text(encoding="utf-8"))
    counts = {e["column"]: e["count"] for e in summary["threshold_counts"]}
    print(
        "criterion 11 (reference dataset counts): informational - "
        f"annual_inc>1e6: {counts.get('annual_inc')}, open_acc>40: {counts.get('open_acc')}, "
        f"total_acc>80: {counts.get('total_acc')} (published run saw 339, 1211, 1299)"
    )
