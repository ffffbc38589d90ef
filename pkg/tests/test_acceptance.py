"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from repeaterlab import oracle
from repeaterlab.bell import PERFECT, SINGLET, BellVector, ErrorModel, connect_pair, purify_step, shape_state
from repeaterlab.nesting import (
    NestingConfig,
    asymptote,
    curve_intersections,
    direct_transmission_time,
    fixed_point_profile,
    loglog_slope,
    recurse,
)
from repeaterlab.photonics import (
    Emission,
    LinkParams,
    OpticalParams,
    broadening_infidelity,
    optimize_pi_single,
    pi_single_bound,
    raman_from_emission,
    resonant_from_emission,
    resonant_success,
)

SECONDS_PER_YEAR = 365.25 * 24 * 3600
ERR995 = ErrorModel(0.995, 0.995)


REPORT: list[str] = []  # shown by the terminal-summary hook in conftest


def _report(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    REPORT.append(line)
    print(line, flush=True)
    return ok


def criterion_1():
    t_start = time.perf_counter()
    link = LinkParams(L0=20.0, attenuation=0.2)
    gen = resonant_from_emission(Emission(Pem=0.08, collection=1.0, t0=1e-6), link)
    cfg = NestingConfig.from_generation(gen, upsilon=0.0, err=ERR995, M=1, n_total=50)
    final = recurse(cfg).final
    elapsed = time.perf_counter() - t_start
    ok = 0.75 <= final.fidelity <= 0.85 and 0.3 <= final.avg_time <= 30.0 and elapsed < 1.0
    return [("1 headline 1000 km", ok,
             f"F0={gen.F0:.4f} F={final.fidelity:.4f} T={final.avg_time:.3g} s runtime={elapsed:.3f} s")]


def criterion_2():
    eps = 10 ** (-0.2 * 1000 / 10)
    t0, t_c = 1e-6, 1000 / 2.0e5
    P = resonant_success(0.08, eps)
    years = direct_transmission_time(P, t0, t_c) / SECONDS_PER_YEAR
    ok = abs(math.log10(years) - 10) <= 2
    return [("2 direct transmission", ok, f"{years:.3g} years (target 1e10 within 2 decades)")]


def criterion_3():
    out = []
    for F0 in (0.97, 0.98, 0.99):
        cfg = NestingConfig(F0=shape_state(F0, 0.0), T0=0.0128, t_c=1e-4, err=ERR995, M=3, n_total=1024)
        trace = recurse(cfg, range(2, 1025))
        fps = fixed_point_profile(trace)
        gap = max(abs(trace.A(n).fidelity - fps[n].a) for n in range(2, 1025))
        low = min(trace.A(n).fidelity for n in range(2, 1025))
        out.append((f"3 three pumps suffice F0={F0}", gap < 0.01 and low > 0.5,
                    f"max |F_A - F_FP| = {gap:.4f}, min F_A = {low:.4f}"))
    return out


def _staircase_check(F0, err, label):
    res = asymptote(shape_state(F0, 0.0), err, max_levels=50)
    fids = [s.A.a for s in res.staircase]
    tail = fids[1:]
    # one-ulp wiggles at the fully mixed limit are roundoff, not oscillation
    monotone = (all(b <= a + 1e-14 for a, b in zip(tail, tail[1:]))
                or all(b >= a - 1e-14 for a, b in zip(tail, tail[1:])))
    top = curve_intersections(shape_state(F0, 0.0), err)[0]
    ok = monotone and res.residual < 1e-10 and len(res.staircase) - 1 <= 50 and abs(top.a - res.fidelity) < 1e-8
    return (label, ok, f"F_inf={res.fidelity:.10f} levels={len(res.staircase) - 1} "
                       f"residual={res.residual:.1e} intercept={top.a:.10f}")


def criterion_4():
    return [
        _staircase_check(0.99, ErrorModel(0.99, 0.99), "4 staircase F0=p=eta=0.99"),
        _staircase_check(0.99, ERR995, "4+ staircase F0=0.99, p=eta=0.995 (non-trivial limit)"),
    ]


def criterion_5():
    rng = np.random.default_rng(5)

    def rand_bell():
        return BellVector.from_weights(rng.dirichlet(np.ones(4)).tolist())

    def rand_err():
        return ErrorModel(float(rng.uniform(0.9, 1.0)), float(rng.uniform(0.9, 1.0)))

    worst_p = worst_s = 0.0
    for _ in range(100):
        x, y, err = rand_bell(), rand_bell(), rand_err()
        post, p_s = oracle.purify_circuit(oracle.from_bell_vector(x), oracle.from_bell_vector(y), err)
        got = purify_step(x, y, err)
        worst_p = max(worst_p, got.state.max_abs_diff(oracle.diag_in_bell_basis(post)), abs(got.success_prob - p_s))
    for _ in range(100):
        x, y, err = rand_bell(), rand_bell(), rand_err()
        ref = oracle.diag_in_bell_basis(oracle.swap_circuit(oracle.from_bell_vector(x), oracle.from_bell_vector(y), err))
        worst_s = max(worst_s, connect_pair(x, y, err).max_abs_diff(ref))
    return [
        ("5 oracle purify_step", worst_p < 1e-12, f"max deviation {worst_p:.1e} over 100 cases"),
        ("5 oracle connect_pair", worst_s < 1e-12, f"max deviation {worst_s:.1e} over 100 cases"),
    ]


def criterion_6():
    out = []
    b = broadening_infidelity(OpticalParams(g=0.0, kappa=1.0, gamma=1.0, Gamma=1.0))
    out.append(("6a broadening spot value", abs(b - 0.375) < 1e-15, f"{b!r}"))

    worst = 0.0
    for Pem in np.geomspace(1e-4, 1.0, 30):
        for eps in np.geomspace(1e-4, 1.0, 30):
            if eps * Pem < 0.01:
                approx = eps * Pem / 4
                worst = max(worst, abs(resonant_success(Pem, eps) - approx) / approx)
    out.append(("6b small-eps success approximation", worst < 0.01, f"max relative error {worst:.2e}"))

    # equal F0, no penalties: resonant F = (1 + exp(-Pem (1 - eps))) / 2, Raman F = 1 - Pem_R
    ratios = []
    for F in (0.99, 0.999, 0.9999, 0.99999):
        eps = 1e-6
        Pem_res = -math.log(2 * F - 1) / (1 - eps)
        em_raman = Emission(Pem=1 - F, collection=eps)
        P_ram = raman_from_emission(em_raman, LinkParams(1.0, 0.0)).P
        ratios.append(P_ram / resonant_success(Pem_res, eps))
    trend = all(abs(b - 4) < abs(a - 4) for a, b in zip(ratios, ratios[1:]))
    out.append(("6c Raman/resonant ratio -> 4", trend and abs(ratios[-1] - 4) < 1e-3,
                "ratios " + ", ".join(f"{r:.5f}" for r in ratios)))

    rows = []
    worst = 0.0
    for G in (1e-3, 1e-2):
        for Pe in (1e-4, 1e-3):
            opt = optimize_pi_single(G, 1.0, Pe)
            bound = pi_single_bound(G, Pe)
            rel = abs((1 - opt.fidelity) - (1 - bound)) / (1 - bound)
            worst = max(worst, rel)
            rows.append(f"G/g={G:g},P/e={Pe:g}: 1-F grid {1 - opt.fidelity:.3e} vs closed form {1 - bound:.3e}")
    out.append(("6d pi_single grid optimum vs closed-form bound (infidelity, 5%)", worst <= 0.05,
                f"worst relative gap {worst:.2f}; " + "; ".join(rows)))
    return out


def criterion_7():
    cfg = NestingConfig(F0=shape_state(0.99, 0.0), T0=0.0128, t_c=1e-4, err=ERR995, M=3, n_total=1024)
    ns = list(range(8, 1025))
    trace = recurse(cfg, ns)
    slope = loglog_slope(ns, [trace.A(n).avg_time for n in ns])
    return [("7 polynomial time scaling", 1.0 <= slope <= 4.0, f"log-log slope {slope:.3f}")]


def criterion_8():
    vals = [asymptote(shape_state(0.99, u), ERR995).fidelity for u in (0.0, 0.1, 0.2, 0.3)]
    ok = all(b <= a for a, b in zip(vals, vals[1:])) and vals[-1] > 0.5
    return [("8 error-shape tolerance", ok, "F_inf(upsilon=0,.1,.2,.3) = " + ", ".join(f"{v:.5f}" for v in vals))]


def criterion_9():
    bad = []
    for M in (0, 1, 2, 3, 5, (1, 3, 0, 2)):
        cfg = NestingConfig(F0=SINGLET, T0=1.0, t_c=1e-4, err=PERFECT, M=M, n_total=1024)
        trace = recurse(cfg, range(2, 1025))
        if any(trace.A(n).fidelity != 1.0 for n in range(2, 1025)):
            bad.append(M)
    return [("9 lossless limit", not bad, "F_A(n) = 1 for n = 2..1024, M in {0,1,2,3,5,(1,3,0,2)}"
             if not bad else f"failed for M={bad}")]


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion):
    results = criterion()
    for label, ok, detail in results:
        _report(label, ok, detail)
    failed = [label for label, ok, _ in results if not ok]
    assert not failed, f"failed: {failed}"


if __name__ == "__main__":
    all_ok = True
    for crit in CRITERIA:
        for label, ok, detail in crit():
            all_ok &= _report(label, ok, detail)
    sys.exit(0 if all_ok else 1)
