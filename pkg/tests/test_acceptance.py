"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records one ``criterion N: PASS|FAIL`` line; ``conftest.py``
prints them after the run. ``python3 tests/test_acceptance.py`` runs the
same checks without pytest.
"""

import math
import subprocess
import sys
import time

from scipy.integrate import quad

from besovlab.besov import lp_norm
from besovlab.capset import PerimeterMCConfig, fractional_perimeter
from besovlab.core import CORPUS_CATALOG, BesovParams, CorpusSpec, LorentzParams, make_corpus
from besovlab.geometry import AxisBox
from besovlab.harness import SuiteConfig, run_suite
from besovlab.lorentz import LebesgueVolume, lorentz_norm
from besovlab.rearrange import equimeasurable, hardy_constant, rearrange, weighted_integral

VERDICTS: list[str] = []


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def rows(suites, **kw):
    return run_suite(SuiteConfig(suites=suites, seed=42, **kw))


def corpus(dim=1, res=64):
    return make_corpus(CorpusSpec(tuple(CORPUS_CATALOG), dim, res))


def test_criterion_01_interval_perimeter():
    t0 = time.perf_counter()
    est = fractional_perimeter(AxisBox([0.0], [1.0]), BesovParams(0.5, 1, 1, 1, strict=False),
                               PerimeterMCConfig(10_000, seed=42))
    dt = time.perf_counter() - t0
    exact = 2 / (0.5 * 0.5)
    ok = abs(est.value / exact - 1) <= 0.02 and dt < 10
    verdict(1, ok, f"P = {est.value:.4f} +- {est.stderr:.4f} vs 8, {dt * 1e3:.0f} ms")


def test_criterion_02_equal_exponent_reduction():
    est = fractional_perimeter(AxisBox([0.0], [1.0]), BesovParams(0.2, 2, 2, 1),
                               PerimeterMCConfig(10_000, seed=42))
    exact = math.sqrt(2 / (0.4 * 0.6))
    verdict(2, abs(est.value / exact - 1) <= 0.03,
            f"P = {est.value:.5f} +- {est.stderr:.5f} vs {exact:.5f}")


def test_criterion_03_scaling_laws():
    reps = rows(("scaling",))
    kinds = {r.check_id.split("/")[1] for r in reps}
    regimes = {BesovParams(*map(float, r.params.split("/"))).regime for r in reps}
    per_regime = {g: len({r.params for r in reps
                          if BesovParams(*map(float, r.params.split("/"))).regime == g})
                  for g in sorted(regimes)}
    worst = max(abs(r.ratio - 1) for r in reps)
    ok = all(r.passed for r in reps) and kinds == {"besov", "lorentz", "perimeter"} \
        and min(per_regime.values()) >= 3 and regimes == {"A", "B"}
    verdict(3, ok, f"{len(reps)} rows, tuples per regime {per_regime}, worst deviation {worst:.2e}")


def test_criterion_04_weak_below_lorentz():
    reps = [r for r in rows(("lemma21",)) if r.check_id.startswith("lemma21/weak_vs_lorentz")]
    ok = len(reps) == len(CORPUS_CATALOG) * 2 * 2 * 2 and all(r.passed for r in reps)
    worst = max(r.ratio for r in reps)
    verdict(4, ok, f"{len(reps)} rows, max weak/lorentz {worst:.6f} (slack 1e-12)")


def test_criterion_05_layer_cake():
    worst = 0.0
    for dim, res in ((1, 64), (2, 32)):
        for _, f in corpus(dim, res):
            for p0 in (0.8, 1.0, 1.5, 2.0, 3.0):
                a = lorentz_norm(f, LorentzParams(p0, p0), LebesgueVolume())
                worst = max(worst, abs(a / lp_norm(f, p0) - 1))
    verdict(5, worst <= 1e-10, f"max relative deviation {worst:.1e}")


def test_criterion_06_equimeasurable():
    worst = 0.0
    ok = True
    for dim in (1, 2):
        for _, f in corpus(dim, 64):
            good, dev = equimeasurable(f, rearrange(f))
            ok &= good
            worst = max(worst, dev / f.cell_volume)
    verdict(6, ok, f"max deviation {worst:.2e} cell volumes")


def test_criterion_07_riesz():
    reps = [r for r in rows(("rearrange",)) if "/riesz" in r.check_id]
    equal = [r for r in reps if "riesz_equal" in r.check_id]
    ok = len(reps) >= 10 and equal and all(r.passed for r in reps)
    verdict(7, bool(ok), f"{len(reps)} pairs, {len(equal)} radial pairs equal within 1e-9")


def test_criterion_08_hardy():
    reps = rows(("hardy",))
    oracle = next(r for r in reps if r.check_id == "hardy/oracle/indicator")
    # independent continuous evaluation of both sides for the bump, p = 1, beta = 0.3
    p, beta = 1.0, 0.3
    r = p / (1 - p * beta)
    bump = lambda x: math.exp(-1 / (1 - x * x)) if abs(x) < 1 else 0.0
    lhs_exact = 2 * quad(lambda x: bump(x) * x ** -beta, 0, 1, limit=200)[0]
    f = dict(corpus())["bump"]
    lhs = weighted_integral(rearrange(f), p, p * beta)
    rhs = hardy_constant(1, p, beta) * lorentz_norm(f, LorentzParams(r, p), LebesgueVolume()) ** p
    ok = (abs(oracle.lhs / 4 - 1) <= 0.02 and abs(lhs / rhs - 1) <= 0.03
          and abs(rhs / lhs_exact - 1) <= 0.03 and all(x.passed for x in reps))
    verdict(8, ok, f"indicator {oracle.lhs:.4f} vs 4; bump identity {lhs:.5f} vs C*norm "
                   f"{rhs:.5f} (continuous {lhs_exact:.5f}); {len(reps)} suite rows")


def test_criterion_09_coarea():
    reps = rows(("coarea",), params=(BesovParams(0.3, 1, 1, 1),))
    worst = max(abs(r.ratio - 1) for r in reps)
    ok = len(reps) == 4 and all(r.passed for r in reps)
    verdict(9, ok, f"{len(reps)} radial entries, worst |ratio-1| {worst:.1e}")


def test_criterion_10_capacity_perimeter_limit():
    reps = rows(("perimeter_capacity",), params=(BesovParams(0.3, 1, 1, 1),))
    limit = next(r for r in reps if r.check_id.startswith("perimeter_capacity/limit"))
    trend = [r.ratio for r in reps if r.check_id.startswith("perimeter_capacity/trend/eps")]
    trend.append(limit.ratio)
    mono = next(r for r in reps if r.check_id == "perimeter_capacity/trend/monotone")
    verdict(10, limit.passed and "monotone" in mono.flags,
            f"ratio at {limit.check_id.split('/')[-1]} = {limit.ratio:.5f}; "
            f"trend {' '.join(f'{t:.4f}' for t in trend)}")


def test_criterion_11_chains():
    reps = rows(("sobolev_chain", "capacitary_chain"))
    by_suite = {s: {r.params for r in reps if r.check_id.startswith(s)}
                for s in ("sobolev_chain", "capacitary_chain")}
    worst = max(r.ratio - 1 for r in reps)
    ok = all(r.passed for r in reps) and min(len(v) for v in by_suite.values()) >= 3
    verdict(11, ok, f"{len(reps)} ratio rows over {len(by_suite['sobolev_chain'])} tuples, "
                    f"max spread {worst:.2e}")


def test_criterion_12_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        subprocess.run([sys.executable, "-m", "besovlab", "verify", "--seed", "42",
                        "--out", str(path)], check=True, capture_output=True)
        outs.append(path.read_bytes())
    verdict(12, outs[0] == outs[1], f"two verify runs, {len(outs[0])} bytes each, identical")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
