"""Acceptance criteria, one test per criterion.

Every test prints a single ``CRITERION <n> PASS|FAIL: ...`` line (also
repeated in the terminal summary). Per-instance time caps are the ones the
criteria name; ``ORTHOPACK_ACCEPTANCE_CAP`` (seconds) lowers all of them for
a quick run. Instances that are not bundled are looked up through
``ORTHOPACK_DATA`` like ``orthopack bench`` does.

A criterion that cannot be met for a reason outside the solver (missing
benchmark files, a best-effort timeout) reports FAIL and is marked xfail;
a wrong answer always fails hard.
"""

import itertools
import os
import random
import time

import pytest

import conftest
from conftest import farey, overlap_free, random_decision, random_knapsack, worst_multiset_sum
from orthopack.bench import REFERENCE, data_dirs, find_instance, generated_instances
from orthopack.bounds import u_k
from orthopack.graphs import Graph, Orientation, find_c4, max_weight_clique_comparability, recognize_comparability
from orthopack.model import validate_packing
from orthopack.okp import solve_okp
from orthopack.opp import Limits, solve_opp
from orthopack.oracles import (
    brute_force_okp, brute_force_opp, brute_has_induced_c4, brute_is_comparability, brute_max_clique_weight,
)

SMALL = [f"beasley{k}" for k in range(1, 13)] + ["cgcut1", "cgcut3", "wang20", "chrwhi62"]
OKP = ["okp1", "okp2", "okp3", "okp4", "okp5"]
GCUT_EXACT = ["gcut1", "gcut2", "gcut3", "gcut5", "gcut6", "gcut7", "gcut9", "gcut10", "gcut11"]
GCUT_TIMEOUT_OK = ["gcut4", "gcut8", "gcut12", "cgcut2"]

# witnesses produced by this module, re-validated by criterion 8
WITNESSES = []
RUNS = {}


def cap(seconds):
    env = os.environ.get("ORTHOPACK_ACCEPTANCE_CAP")
    return min(seconds, float(env)) if env else seconds


def report(n, ok, detail):
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


def witness(label, instance, subset, packing):
    WITNESSES.append((label, instance, list(subset), dict(packing)))


def run_table1(name, seconds):
    """Solve one Table 1 instance once per session; ``None`` when the file is missing."""
    if name not in RUNS:
        inst = find_instance(name, data_dirs())
        if inst is None:
            RUNS[name] = None
        else:
            res = solve_okp(inst, Limits(seconds=cap(seconds)))
            witness(name, inst, res.subset, res.packing)
            RUNS[name] = res
    return RUNS[name]


def summarize(names, seconds):
    solved, wrong, timeouts, missing = [], [], [], []
    for name in names:
        res = run_table1(name, seconds)
        expected = REFERENCE[name].optimum
        if res is None:
            missing.append(name)
        elif not res.optimal:
            timeouts.append(f"{name} ({res.value}..{res.upper_bound})")
        elif res.value != expected:
            wrong.append(f"{name} {res.value} != {expected}")
        else:
            solved.append(f"{name} {res.value} in {res.seconds:.1f}s")
    return solved, wrong, timeouts, missing


def test_criterion_1_table1_small_set():
    solved, wrong, timeouts, missing = summarize(SMALL, 120)
    ok = not (wrong or timeouts or missing)
    detail = f"{len(solved)}/{len(SMALL)} exact within 120 s"
    if wrong:
        detail += "; wrong: " + ", ".join(wrong)
    if timeouts:
        detail += "; timeouts: " + ", ".join(timeouts)
    if missing:
        detail += "; data unavailable: " + ", ".join(missing)
    report(1, ok, detail)
    assert not wrong, wrong
    if not ok:
        pytest.xfail(detail)


def test_criterion_2_table1_medium_set():
    solved, wrong, timeouts, missing = summarize(OKP + GCUT_EXACT, 900)
    extra, extra_wrong, extra_timeouts, extra_missing = summarize(GCUT_TIMEOUT_OK, 900)
    ok = not (wrong or timeouts or missing or extra_wrong)
    detail = f"{len(solved)}/{len(OKP) + len(GCUT_EXACT)} exact within 900 s ({'; '.join(solved)})"
    if wrong or extra_wrong:
        detail += "; wrong: " + ", ".join(wrong + extra_wrong)
    if timeouts:
        detail += "; timeouts: " + ", ".join(timeouts)
    if missing:
        detail += "; data unavailable: " + ", ".join(missing)
    if extra_timeouts:
        detail += "; allowed timeouts: " + ", ".join(extra_timeouts)
    if extra:
        detail += "; also solved: " + ", ".join(extra)
    report(2, ok, detail)
    assert not (wrong or extra_wrong), wrong + extra_wrong
    if not ok:
        pytest.xfail(detail)


def test_criterion_3_box_counts_are_informational():
    rows = []
    for name, res in sorted(RUNS.items()):
        if res is not None and res.optimal:
            ref = REFERENCE[name].opt_boxes
            rows.append(f"{name} {len(res.subset)} (table {ref})")
    # only optimum values are checked (criteria 1 and 2); the counts are logged
    report(3, True, "box counts: " + (", ".join(rows) if rows else "no instance solved in this session"))


def test_criterion_4_opp_matches_oracle():
    rng = random.Random(2024)
    start = time.monotonic()
    disagreements = 0
    total = 500
    for k in range(total):
        inst = random_decision(rng, 5, 10, tight=k % 2 == 0)
        verdict = solve_opp(inst)
        truth = brute_force_opp(inst)
        if verdict.feasible != (truth is not None):
            disagreements += 1
        if verdict.feasible:
            witness(f"opp-{k}", inst, range(inst.n), verdict.packing)
    elapsed = time.monotonic() - start
    ok = disagreements == 0 and elapsed < 300
    report(4, ok, f"{total} instances, {disagreements} disagreements, {elapsed:.1f} s total")
    assert ok


def test_criterion_5_okp_matches_oracle():
    rng = random.Random(4048)
    total, disagreements = 200, 0
    for k in range(total):
        inst = random_knapsack(rng, 8, 12)
        res = solve_okp(inst)
        if not res.optimal or res.value != brute_force_okp(inst)[0]:
            disagreements += 1
        witness(f"okp-{k}", inst, res.subset, res.packing)
    report(5, disagreements == 0, f"{total} instances, {disagreements} disagreements")
    assert disagreements == 0


def test_criterion_6_dual_feasibility():
    xs = farey(30)
    worst = {k: worst_multiset_sum(lambda x, k=k: u_k(x, k), xs, 4) for k in range(1, 7)}
    violations = [k for k, v in worst.items() if v > 1]
    report(6, not violations, f"k = 1..6 over {len(xs)} points, multisets of size <= 4; max sums "
                              + ", ".join(f"k={k}: {v}" for k, v in worst.items()))
    assert not violations


def _graph_disagreements(g, rng):
    errors = 0
    res = recognize_comparability(g)
    comparable = isinstance(res, Orientation)
    if comparable != brute_is_comparability(g.n, g.adj):
        errors += 1
    elif comparable:
        w = [rng.randint(1, 9) for _ in range(g.n)]
        _, weight = max_weight_clique_comparability(g, res, w)
        errors += weight != brute_max_clique_weight(g.n, g.adj, w)
    elif not res.is_valid(g.adj):
        errors += 1
    errors += (find_c4(g.adj, g.mask) is not None) != brute_has_induced_c4(g.n, g.adj)
    return errors


def _graph(n, code):
    pairs = list(itertools.combinations(range(n), 2))
    return Graph.from_edges(n, [p for k, p in enumerate(pairs) if code >> k & 1])


def test_criterion_7_graph_recognizers():
    rng = random.Random(7)
    checked = errors = 0
    for n in range(1, 7):
        for code in range(2 ** (n * (n - 1) // 2)):
            errors += _graph_disagreements(_graph(n, code), rng)
            checked += 1
    for _ in range(1000):
        errors += _graph_disagreements(_graph(7, rng.getrandbits(21)), rng)
        checked += 1
    report(7, errors == 0, f"{checked} graphs (all n <= 6, 1000 random n = 7), {errors} disagreements")
    assert errors == 0


def test_criterion_9_generated_3d_class_i():
    proved, rows = 0, []
    for name, inst in generated_instances(3, "I", 20, 1, range(1, 11)):
        res = solve_okp(inst, Limits(seconds=cap(1000)))
        witness(name, inst, res.subset, res.packing)
        proved += res.optimal
        rows.append(f"s{name.rsplit('-s', 1)[1]}: {res.value}{'' if res.optimal else '?'} {res.seconds:.0f}s")
    ok = proved >= 8
    report(9, ok, f"{proved}/10 proved optimal within 1000 s ({', '.join(rows)})")
    if not ok:
        pytest.xfail("fewer than 8 of 10 generated 3-D instances proved within the cap")


def test_criterion_8_every_witness_validates():
    if not WITNESSES:
        # run on its own: produce a small corpus here
        rng = random.Random(8)
        for k in range(100):
            inst = random_knapsack(rng, 8, 12)
            res = solve_okp(inst)
            witness(f"okp-{k}", inst, res.subset, res.packing)
    bad = [label for label, inst, subset, packing in WITNESSES
           if validate_packing(inst, subset, packing) is not None or not overlap_free(inst, packing)]
    report(8, not bad, f"{len(WITNESSES)} witnesses checked, {len(bad)} invalid")
    assert not bad, bad
