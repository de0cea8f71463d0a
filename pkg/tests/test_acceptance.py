"""Acceptance gate: one PASS/FAIL line per criterion, printed straight to the terminal.

Sweeps are seeded, so every run sees the same behaviors.
"""

import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from contextuality.behavior import EPS_DISTURBANCE, from_correlators, is_nondisturbing
from contextuality.coupling import canonical_maximal_coupling, mu, mu_lp
from contextuality.extension import extend, lift_behavior
from contextuality.lp import DEFAULT_EPS
from contextuality.ncycle import CycleCorrelators, correlators, excess, extended_criterion, s_function, traditional_criterion
from contextuality.polytope import extended_system, is_extended_noncontextual, is_noncontextual
from contextuality.quantifiers import contextual_fraction, l1_distance, m_deficit, mu_deficit, negativity
from contextuality.sampling import NondisturbingSampler, dirichlet_behavior, disturb, mixed_behavior
from contextuality.scenario import path_scenario, make_scenario, n_cycle

SWEEP = 1000
TOL = 1e-6


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, lines=()):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})")
            for line in lines:
                print(f"  {line}")
    return emit


def boundary_cases(n):
    """Exact behaviors sitting on or just off the extended bound."""
    out = []
    for h in (Fraction(0), Fraction(1, 3), Fraction(-1, 2)):
        out.append(CycleCorrelators.from_flat(n, [1] * n, [h] * n).to_behavior(exact=True))
    w = Fraction(n - 2, n)
    for scale in (w, w + Fraction(1, 1024), w - Fraction(1, 1024)):
        pair = [scale] * (n - 1) + [-scale]
        out.append(CycleCorrelators.from_flat(n, pair, [0] * n).to_behavior(exact=True))
    return out


def decide_both(b, system):
    """Extended LP verdict and closed-form verdict, re-decided exactly near the threshold."""
    crit = extended_criterion(correlators(b))
    lp = is_extended_noncontextual(b, exact=b.exact, system=system)
    if not b.exact and (crit.boundary or lp.boundary):
        exact = b.as_exact()
        crit = extended_criterion(correlators(exact))
        lp = is_extended_noncontextual(exact, exact=True, system=system)
    return crit, lp


@pytest.fixture(scope="module")
def cycle_sweep():
    """Criterion 1 sweep, kept for criterion 2."""
    rows = {}
    start = time.perf_counter()
    for n in (3, 4, 5):
        rng = np.random.default_rng(1000 + n)
        s = n_cycle(n)
        system = extended_system(s)
        sampler = NondisturbingSampler.build(s, rng, tries=1500 if n == 5 else 400)
        behaviors = [mixed_behavior(s, rng, sampler) for _ in range(SWEEP)] + boundary_cases(n)
        results = [(b, *decide_both(b, system)) for b in behaviors]
        rows[n] = (system, results)
    return rows, time.perf_counter() - start


def test_criterion_1_cycle_oracle_agreement(cycle_sweep, report):
    rows, elapsed = cycle_sweep
    total = agree = boundary = contextual = disturbing = 0
    for n, (_, results) in rows.items():
        for b, crit, lp in results:
            total += 1
            agree += crit.noncontextual == lp.noncontextual
            boundary += crit.boundary or lp.boundary
            contextual += not crit.noncontextual
            disturbing += not is_nondisturbing(b, tol=0).nondisturbing
    ok = agree == total and elapsed < 300 and all(len(r) >= SWEEP for _, r in rows.values())
    report(1, "n-cycle oracle agreement", ok,
           f"{agree}/{total} agree, {contextual} contextual, {disturbing} disturbing, "
           f"{boundary} boundary adjudicated, {elapsed:.1f}s")
    assert agree == total
    assert elapsed < 300


def test_criterion_2_closed_form_quantifiers(cycle_sweep, report):
    rows, _ = cycle_sweep
    worst = {"Negativity": 0.0, "L1Uniform": 0.0, "Mu": 0.0}
    misses = dict.fromkeys(worst, 0)
    count = 0
    for n, (system, results) in rows.items():
        e = extend(n_cycle(n))
        for b, _, _ in results:
            target = float(excess(correlators(b.as_exact()))) / 2
            lifted = lift_behavior(e, b)
            got = {
                "Negativity": negativity(lifted, verify=False).value,
                "L1Uniform": l1_distance(lifted, "uniform", verify=False).value,
                "Mu": mu_deficit(b, verify=False, system=system).value,
            }
            count += 1
            for k, v in got.items():
                dev = abs(float(v) - target)
                worst[k] = max(worst[k], dev)
                misses[k] += dev > TOL
    ok = not any(misses.values())
    detail = ", ".join(f"{k}: {count - misses[k]}/{count} within {TOL:g}, max dev {worst[k]:.3g}" for k in worst)
    report(2, "closed-form quantifier coincidence", ok, detail,
           [f"{k}: {'PASS' if misses[k] == 0 else 'FAIL'}" for k in worst])
    assert ok, detail


def test_criterion_3_pr_box(report):
    b = from_correlators(4, [1, 1, 1, -1], [0, 0, 0, 0], exact=True)
    c = correlators(b)
    lifted = lift_behavior(extend(b.scenario), b)
    trad = traditional_criterion(c)
    mu_val = mu_deficit(b, exact=True).value
    checks = {
        "traditional s = 4 > 2": trad.s == 4 and not trad.noncontextual,
        "extended excess = 2": excess(c) == 2,
        "Negativity(extended) = 1": abs(negativity(lifted, exact=True).value - 1) <= TOL,
        "L1Uniform(extended) = 1": abs(l1_distance(lifted, "uniform", exact=True).value - 1) <= TOL,
        "M_u = 1": abs(mu_val - 1) <= TOL,
        "CF(traditional) = 0.5": abs(contextual_fraction(b, exact=True).value - Fraction(1, 2)) <= TOL,
        "M = M_u": abs(m_deficit(b, exact=True).value - mu_val) <= TOL,
    }
    diagnostics = {
        "Negativity(extended)": negativity(lifted, exact=True).value,
        "Negativity(traditional)": negativity(b, exact=True).value,
        "L1Uniform(extended)": l1_distance(lifted, "uniform", exact=True).value,
        "L1Total(extended)": l1_distance(lifted, "total", exact=True).value,
        "CF(traditional)": contextual_fraction(b, exact=True).value,
        "CF(extended)": contextual_fraction(lifted, exact=True).value,
        "M_u": mu_val,
        "M": m_deficit(b, exact=True).value,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    lines = [f"{k}: {'PASS' if v else 'FAIL'}" for k, v in checks.items()]
    lines.append("computed: " + ", ".join(f"{k} = {v}" for k, v in diagnostics.items()))
    report(3, "PR-box checkpoint", ok, f"{len(checks) - len(failed)}/{len(checks)} values match"
           + (f"; failing: {', '.join(failed)}" if failed else ""), lines)
    assert ok, failed


def test_criterion_4_nondisturbance_reduction(report):
    total = agree = contextual = 0
    for s, seed in ((n_cycle(4), 41), (path_scenario(), 42)):
        rng = np.random.default_rng(seed)
        system = extended_system(s)
        sampler = NondisturbingSampler.build(s, rng)
        for _ in range(SWEEP):
            b = sampler.sample(rng)
            assert is_nondisturbing(b, tol=0).nondisturbing
            ext = is_extended_noncontextual(b, system=system)
            trad = is_noncontextual(b)
            total += 1
            agree += ext.noncontextual == trad.noncontextual
            contextual += not trad.noncontextual
    ok = agree == total
    report(4, "nondisturbance reduction", ok, f"{agree}/{total} agree, {contextual} contextual")
    assert ok


def test_criterion_5_coupling(report):
    rng = np.random.default_rng(5)
    families = mu_fail = canon_fail = 0
    worst_mu = worst_canon = 0.0
    for _ in range(SWEEP):
        l, k = int(rng.integers(1, 5)), int(rng.integers(2, 5))
        ps = rng.dirichlet(np.ones(k), size=l)
        # sprinkle exact zeros and repeated marginals
        if rng.uniform() < 0.2:
            ps[0, int(rng.integers(k))] = 0
            ps[0] /= ps[0].sum()
        if l > 1 and rng.uniform() < 0.2:
            ps[1] = ps[0]
        families += 1
        dev = abs(mu(ps) - mu_lp(ps))
        worst_mu = max(worst_mu, dev)
        mu_fail += dev > 1e-9
        t = canonical_maximal_coupling(ps)
        dev = max(max(np.max(np.abs(t.marginal(j) - ps[j])) for j in range(l)), abs(t.p_equal() - mu(ps)))
        worst_canon = max(worst_canon, dev)
        canon_fail += dev > 1e-12 or t.joint.min() < 0
    ok = mu_fail == 0 and canon_fail == 0
    report(5, "coupling correctness", ok,
           f"{families} families, mu vs LP max dev {worst_mu:.2g}, canonical max dev {worst_canon:.2g}")
    assert ok


def test_criterion_6_path_scenario(report):
    s = path_scenario()
    rng = np.random.default_rng(6)
    system = extended_system(s)
    contextual = disturbing = 0
    for i in range(SWEEP):
        b = dirichlet_behavior(s, rng) if i % 2 else disturb(mixed_behavior(s, rng), float(rng.uniform()), rng)
        disturbing += not is_nondisturbing(b, tol=EPS_DISTURBANCE).nondisturbing
        contextual += not is_extended_noncontextual(b, system=system).noncontextual
    ok = contextual == 0
    report(6, "path scenario always extends", ok,
           f"{SWEEP - contextual}/{SWEEP} extended-noncontextual, {disturbing} disturbing")
    assert ok


def test_criterion_7_co_vanishing(report):
    threshold = 2 * DEFAULT_EPS
    triangle3 = make_scenario(["a", "b", "c"], [["a", "b"], ["b", "c"], ["c", "a"]], ["0", "1", "2"])
    scenarios = [n_cycle(3), n_cycle(4), path_scenario(), triangle3]
    total = disagree = contextual = 0
    for idx, s in enumerate(scenarios):
        rng = np.random.default_rng(70 + idx)
        sampler = NondisturbingSampler.build(s, rng, tries=200)
        for _ in range(125):
            b = mixed_behavior(s, rng, sampler)
            feasible = is_noncontextual(b).noncontextual
            small = [contextual_fraction(b).value <= threshold, negativity(b).value <= threshold,
                     l1_distance(b, "uniform").value <= threshold]
            total += 1
            contextual += not feasible
            disagree += any(v != feasible for v in small)
    ok = disagree == 0
    report(7, "quantifier co-vanishing", ok, f"{total} behaviors on {len(scenarios)} scenarios, "
           f"{contextual} contextual, {disagree} disagreements")
    assert ok


def _odd_signs(k):
    grid = np.array(np.meshgrid(*[[1, -1]] * k, indexing="ij")).reshape(k, -1).T
    return grid[(grid == -1).sum(axis=1) % 2 == 1]


def test_criterion_8_s_function(report):
    rng = np.random.default_rng(8)
    signs = {k: _odd_signs(k) for k in range(1, 17)}
    mismatches = 0
    count = 10_000
    for i in range(count):
        k = i % 16 + 1
        # dyadic entries keep every float sum exact; small ranges force ties and zeros
        scale = 2 ** 20 if i % 3 else 4
        z = rng.integers(-scale, scale + 1, size=k) / scale
        brute = float(np.max(signs[k] @ z))
        mismatches += s_function(list(z)) != brute
    ok = mismatches == 0
    report(8, "s-function closed form", ok, f"{count - mismatches}/{count} exact matches, k = 1..16")
    assert ok


def test_criterion_9_cli_determinism(tmp_path, report):
    import json
    (tmp_path / "c4.json").write_text(json.dumps(n_cycle(4).to_dict()))
    (tmp_path / "path3.json").write_text(json.dumps(path_scenario().to_dict()))
    pr = {"scenario": "c4.json", "tables": [["1/2", 0, 0, "1/2"]] * 3 + [[0, "1/2", "1/2", 0]]}
    (tmp_path / "pr.json").write_text(json.dumps(pr))
    fig = {"scenario": "path3.json", "tables": [[0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1]]}
    (tmp_path / "fig.json").write_text(json.dumps(fig))
    commands = [
        ["validate", "c4.json", "pr.json"],
        ["extend", "path3.json"],
        ["extend", "c4.json", "--format", "table"],
        ["check", "pr.json"],
        ["check", "fig.json", "--extended", "--mode", "exact"],
        ["check", "fig.json", "--extended", "--policy", "multimaximal"],
        ["quantify", "pr.json", "--witness"],
        ["quantify", "pr.json", "--extended", "--mode", "exact"],
        ["ncycle", "--n", "4", "--pair", "1,1,1,-1"],
        ["ncycle", "--n", "5", "--pair", "1,1,1,1,1", "--singles=1/2,1/2,1/2,1/2,1/2", "--mode", "exact"],
        ["random", "c4.json", "--count", "25", "--seed", "9", "--disturbance", "0.05"],
        ["random", "path3.json", "--count", "10", "--seed", "9", "--sampler", "dirichlet"],
    ]
    differing = []
    for cmd in commands:
        outs = [subprocess.run([sys.executable, "-m", "contextuality.cli", *cmd], cwd=tmp_path,
                               capture_output=True, check=False) for _ in range(2)]
        if outs[0].stdout != outs[1].stdout or outs[0].returncode != outs[1].returncode or not outs[0].stdout:
            differing.append(cmd[0])
    ok = not differing
    report(9, "CLI determinism", ok, f"{len(commands) - len(differing)}/{len(commands)} commands byte-identical"
           + (f"; differing: {differing}" if differing else ""))
    assert ok
