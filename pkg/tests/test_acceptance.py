"""Acceptance gate: twelve end-to-end criteria at fixed tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible with ``pytest -s``;
under ``pytest -v`` the per-test PASSED/FAILED line carries the same
information) and then asserts, so a failure shows both the gate line and
the measured values.
"""

import json
import math

import numpy as np
import pytest

from gmult.central import (CentralSequence, character_inner, delta2,
                           dimension_sequence, laplace_central, nweiss_delta,
                           riesz_symbol)
from gmult.checkers import check_mikhlin, check_torus3, torus_lattice_symbol
from gmult.cli import _selftest_one, main, parse_torus_expression
from gmult.errors import ExceptionalValueError
from gmult.grids import build_grid
from gmult.mollifier import (cz_probe, mollifier_scaling_report,
                             negative_sobolev_decay, riesz_field_diagonals)
from gmult.symbols import (default_grid, generator_words,
                           laplace_difference, laplace_leibniz_residual,
                           leibniz_residual)
from gmult.vfield import (build_field, invert_vf_symbol, recursion_residual,
                          verify_s00)

from conftest import random_symbol


def _report(num: int, description: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] acceptance {num:02d}: {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. Transform round-trip and norm identity
# ---------------------------------------------------------------------------

def test_01_fourier_selftest(su2, torus3):
    worst = 0.0
    for model, band in ((su2, 8), (torus3, 16)):
        out = _selftest_one(model, band, seed=0)
        worst = max(worst, out["roundtrip_relative_error"],
                    out["norm_identity_relative_error"])
    _report(1, "transform roundtrip and norm identity < 1e-9 "
               "(3-sphere band 8, torus-3 band 16)",
            worst < 1e-9, f"worst rel error {worst:.3e}")


# ---------------------------------------------------------------------------
# 2. Coefficient orthogonality, including signed labels
# ---------------------------------------------------------------------------

def test_02_orthogonality(su2):
    tmax = 10
    grid = build_grid(su2, 10)  # quadrature exact through total band 20
    cols = [grid.coefficient_function(t, i, j)
            for t in range(tmax + 1)
            for i in range(t + 1) for j in range(t + 1)]
    M = np.column_stack(cols)
    gram = M.T @ (grid.weights[:, None] * M.conj())
    expected = np.zeros_like(gram)
    a = 0
    for t in range(tmax + 1):
        d = t + 1
        block = np.einsum("ik,jl->ijkl", np.eye(d),
                          np.eye(d)).reshape(d * d, d * d) / d
        expected[a:a + d * d, a:a + d * d] = block
        a += d * d
    schur_dev = float(np.abs(gram - expected).max())

    signed_dev = 0.0
    for ta in range(-2 * tmax - 2, tmax + 1):
        for tb in range(-2 * tmax - 2, tmax + 1):
            want = (1.0 if ta == tb else 0.0) - (1.0 if ta == -tb - 2
                                                 else 0.0)
            got = character_inner(ta, tb)
            signed_dev = max(signed_dev, abs(got - want))
    ok = schur_dev < 1e-9 and signed_dev < 1e-9
    _report(2, "coefficient/character orthogonality incl. signed labels "
               "in {0, +-1} within 1e-9",
            ok, f"schur dev {schur_dev:.3e}, signed dev {signed_dev:.3e}")


# ---------------------------------------------------------------------------
# 3. Product rules for first-order and second-order differences
# ---------------------------------------------------------------------------

def test_03_leibniz_rules(su2):
    rng = np.random.default_rng(3)
    grid = default_grid(su2, 8)
    words = generator_words(su2, 1)
    worst = 0.0
    for _ in range(100):
        sym = random_symbol(su2, 6, rng)
        tau = random_symbol(su2, 6, rng)
        for word in words:
            worst = max(worst, leibniz_residual(word, sym, tau, grid))
        worst = max(worst, laplace_leibniz_residual(sym, tau, grid))
    _report(3, "first-order and second-difference product rules, "
               "100 random band-6 pairs, residual < 1e-9",
            worst < 1e-9, f"max residual {worst:.3e}")


# ---------------------------------------------------------------------------
# 4. Central second difference: quadrature route equals lattice stencil
# ---------------------------------------------------------------------------

def test_04_central_bridge(su2):
    rng = np.random.default_rng(4)
    vals = {t: complex(v) for t, v in enumerate(rng.standard_normal(21))}
    seq = CentralSequence(su2, vals, zero_beyond=True)
    quad = laplace_central(seq)
    stencil = delta2(seq)
    dev = max(abs(quad.value(t) - stencil.value(t)) for t in range(21))

    sym = seq.as_symbol(22)
    grid_route = laplace_difference(sym, default_grid(su2, 24))
    grid_dev = max(float(np.abs(grid_route.get(t)
                                - stencil.value(t) * np.eye(t + 1)).max())
                   for t in range(21))
    ok = dev < 1e-9 and grid_dev < 1e-9
    _report(4, "central second difference: class-quadrature route equals "
               "dimension-weighted lattice stencil through band 20",
            ok, f"stencil dev {dev:.3e}, grid-route dev {grid_dev:.3e}")


# ---------------------------------------------------------------------------
# 5. Centered difference annihilates the dimension sequence
# ---------------------------------------------------------------------------

def test_05_dimension_annihilation():
    seq = dimension_sequence(41)
    out = nweiss_delta(seq)
    worst = max(abs(out.value(t)) for t in range(41))
    _report(5, "centered second difference of the dimension sequence "
               "vanishes within 1e-10 through band 40",
            worst < 1e-10, f"max |value| {worst:.3e}")


# ---------------------------------------------------------------------------
# 6. Direction-field symbol: contraction property plus checker pass
# ---------------------------------------------------------------------------

def test_06_riesz_norms(su2):
    sym = riesz_symbol(su2, (0.0, 0.0, 1.0), 44)
    worst = max(float(np.linalg.norm(np.atleast_2d(sym.get(t)), 2))
                for t in range(45))
    # order-2 differences at band 24 need exact blocks through band 28
    report = check_mikhlin(sym.restrict(28), band=24)
    ok = worst <= 1.0 + 1e-12 and report.passed
    _report(6, "direction-field symbol operator norms <= 1 + 1e-12 through "
               "band 40 and the multiplier check passes",
            ok, f"max op norm {worst:.15f}, check passed {report.passed}")


# ---------------------------------------------------------------------------
# 7. Resolvent invertibility lattice, recursion residual, inverse class
# ---------------------------------------------------------------------------

def test_07_resolvent(su2):
    spec = build_field(su2, (0.0, 0.0, 1.0), 12)
    xs = np.linspace(-2.0, 2.0, 41)
    mismatches = []
    for x in xs:
        for y in xs:
            c = complex(x, y)
            expected = (abs(x) < 1e-9
                        and abs(2.0 * y - round(2.0 * y)) < 1e-9)
            try:
                invert_vf_symbol(spec, c, band=8)
                got = False
            except ExceptionalValueError:
                got = True
            if got != expected:
                mismatches.append((x, y, expected, got))
    rec_spec = build_field(su2, (0.0, 0.0, 1.0), 16)
    residuals = [recursion_residual(rec_spec, 1.0, j, band=12)
                 for j in (0, 1)]
    rec_worst = max(max(r["residual"], r["offdiagonal"]) for r in residuals)
    s00_spec = build_field(su2, (0.0, 0.0, 1.0), 48)
    s00 = verify_s00(s00_spec, 1.0, band=40)
    growth = max(c.growth for c in s00.conditions)
    ok = (not mismatches) and rec_worst < 1e-9 and s00.passed \
        and growth < 1.25
    _report(7, "inverse exists exactly off the half-integer lattice "
               "(41x41 shift grid); recursion residual < 1e-9; inverse "
               "class growth < 1.25 through band 40",
            ok, f"{len(mismatches)} lattice mismatches, recursion "
                f"{rec_worst:.3e}, growth {growth:.4f}")


# ---------------------------------------------------------------------------
# 8. Torus-3 checker: direction symbol passes, its sign fails
# ---------------------------------------------------------------------------

def test_08_torus3_conditions(torus3):
    fn_pass = parse_torus_expression("k1/abs(k)", 3)
    fn_fail = parse_torus_expression("sign(k1)", 3)
    sym_pass = torus_lattice_symbol(torus3, fn_pass, 64, pad=4)
    sym_fail = torus_lattice_symbol(torus3, fn_fail, 64, pad=4)
    rep_pass = check_torus3(sym_pass, band=64)
    rep_fail = check_torus3(sym_fail, band=64)
    by_name = {c.name: c for c in rep_fail.conditions}
    ok = (rep_pass.passed
          and all(c.passed for c in rep_pass.conditions)
          and by_name["bounded"].passed
          and not by_name["first-difference"].passed)
    detail = ("pass-case constants "
              + ", ".join(f"{c.name}={c.constant:.4f}"
                          for c in rep_pass.conditions)
              + f"; sign first-difference growth "
                f"{by_name['first-difference'].growth:.3f}")
    _report(8, "k1/|k| satisfies all three lattice conditions through "
               "|k|=64; sign(k1) fails the first-difference condition",
            ok, detail)


# ---------------------------------------------------------------------------
# 9. Mollifier normalization and L2 scaling laws
# ---------------------------------------------------------------------------

def test_09_mollifier_slopes(su2, torus3):
    details = []
    ok = True
    for model in (su2, torus3):
        rep = mollifier_scaling_report(model)
        c_fit, l2_fit = rep["c_r_fit"], rep["l2_fit"]
        ok &= abs(c_fit["slope"] - (-1.0)) <= 0.15
        ok &= abs(l2_fit["slope"] - (-0.5)) <= 0.15
        ok &= c_fit["r_squared"] >= 0.98 and l2_fit["r_squared"] >= 0.98
        details.append(f"{model.name}: c_r {c_fit['slope']:.4f}, "
                       f"l2 {l2_fit['slope']:.4f}")
    _report(9, "mollifier normalizer and L2 norm scale with slopes "
               "-1 and -1/2 (+-0.15, R^2 >= 0.98)",
            ok, "; ".join(details))


# ---------------------------------------------------------------------------
# 10. Negative-order decay exponent of the shell coefficients
# ---------------------------------------------------------------------------

def test_10_negative_sobolev_slope(su2):
    out = negative_sobolev_decay(su2, q="rho2", s=0.0)
    slope = out["fit"]["slope"]
    ok = abs(slope - 1.0 / 6.0) <= 0.1
    _report(10, "vanishing-factor decay probe (quadratic factor, s = 0) "
                "has slope within 0.1 of 1/6",
            ok, f"slope {slope:.4f}")


# ---------------------------------------------------------------------------
# 11. Fine-scale kernel probe on the direction-field symbol
# ---------------------------------------------------------------------------

def test_11_cz_probe(su2):
    rep = cz_probe(su2, riesz_field_diagonals(su2))
    slope = rep["fit"]["slope"]
    r2 = rep["fit"]["r_squared"]
    floor = 1.0 / 6.0 - 0.1
    ok = slope >= floor and r2 >= 0.95 and bool(rep["passed"])
    _report(11, "kernel-smoothness probe slope >= 1/6 - 0.1 with "
                "R^2 >= 0.95",
            ok, f"slope {slope:.4f}, R^2 {r2:.4f}")


# ---------------------------------------------------------------------------
# 12. CLI determinism under a fixed seed
# ---------------------------------------------------------------------------

def test_12_cli_determinism(tmp_path, capsys):
    battery = [
        ["fourier-selftest", "--band", "6", "--seed", "7"],
        ["check", "--group", "su2", "--band", "10", "--symbol", "riesz:D3",
         "--checker", "refined", "--seed", "7"],
        ["check", "--group", "torus-3", "--band", "10",
         "--symbol", "k1/abs(k)", "--checker", "torus3", "--seed", "7"],
        ["invert", "--band", "8", "--c", "1", "--recursion-check",
         "--seed", "7"],
        ["probe", "--group", "su2", "--ladder", "0.5,0.25,0.125,0.0625",
         "--symbol", "identity", "--seed", "7"],
    ]
    outputs = {0: [], 1: []}
    for run in (0, 1):
        for idx, args in enumerate(battery):
            out = tmp_path / f"run{run}-{idx}.json"
            code = main(args + ["--out", str(out)])
            assert code == 0, f"battery command {args} exited {code}"
            text = out.read_text()
            stripped = "\n".join(ln for ln in text.splitlines()
                                 if "timing_seconds" not in ln)
            outputs[run].append(stripped)
    capsys.readouterr()
    identical = outputs[0] == outputs[1]
    _report(12, "two seeded runs of the CLI battery are byte-identical "
                "modulo timing fields",
            identical,
            f"{len(battery)} commands compared")
