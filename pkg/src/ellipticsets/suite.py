"""Seeded property suite with one entry per exit criterion.

Each ``criterion_*`` function returns a :class:`CriterionResult`; nothing
here asserts, so callers (the CLI, the acceptance tests) decide what to do
with failures.  Results contain only plain Python types, which keeps the
JSON report byte-stable for a fixed seed.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import counterexample as ce
from .acdo import acdo_value, compute_acdo, fat_zero_set_pair, ray_edge, sup_inf_gap
from .levelsets import ascoli_distance, check_condition, dist_to_level_set
from .matrixineq import (
    BlockPair,
    block_defect,
    forward_direction_check,
    lemma_sm_defect,
    resolvent_lower_defect,
    reverse_direction_check,
)
from .operators import MINUS, PLUS, OperatorSpec, make_operator
from .symmat import op_norm, random_psd_bump, random_sym, resolvent_transform

TOL = 1e-10
SLACK = 1e-8
T_SCHEDULE = (0.1, 0.05, 0.02, 0.01)
CONDITION_X0 = (0.5, 0.0)
# measured minimum row sup-excess for the counterexample at seed 0 was ~7.0
COUNTEREXAMPLE_FLOOR = 1.0

CATALOG = {
    "laplacian": OperatorSpec("laplacian", 3),
    "max_eigenvalue": OperatorSpec("max_eigenvalue", 3),
    "linear_constant": OperatorSpec("linear_constant", 2, {"A": [[1.0, 0.3], [0.3, 0.5]], "f": 0.2}),
    "monge_ampere": OperatorSpec("monge_ampere", 2, {"f": 1.0}),
}


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id}. {self.name}"

    def to_dict(self):
        return {"id": self.id, "name": self.name, "passed": self.passed, "details": _plain(self.details)}


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    return value


def _random_matrix(n, rng):
    """Random symmetric matrix on either side of a level set: mixed scale and a shift along ``I``."""
    s = float(np.exp(rng.uniform(np.log(0.1), np.log(5.0))))
    return random_sym(n, s, rng) + rng.uniform(-3, 3) * np.eye(n)


def criterion_acdo_properties(seed=0, samples=1000, orderings=200, tol=TOL, slack=SLACK):
    """Nondegeneracy, 1-Lipschitz bound and ellipticity of the distance operator."""
    details = {}
    passed = True
    for k, (name, spec) in enumerate(CATALOG.items()):
        F = make_operator(spec)
        n = F.dim
        rng = np.random.default_rng([seed, 1, k])
        worst = {"nondegeneracy": 0.0, "lipschitz": 0.0, "ellipticity": 0.0}
        failures = {"nondegeneracy": 0, "lipschitz": 0, "ellipticity": 0}
        witness = None
        for i in range(samples):
            X = _random_matrix(n, rng)
            tau = rng.uniform(-5, 5)
            Y = random_sym(n, rng.uniform(0, 3), rng)
            fx = acdo_value(F, X, None, tol)
            nd = abs(acdo_value(F, X + tau * np.eye(n), None, tol) - fx - tau)
            lip = abs(acdo_value(F, X + Y, None, tol) - fx) - op_norm(Y)
            worst["nondegeneracy"] = max(worst["nondegeneracy"], nd)
            worst["lipschitz"] = max(worst["lipschitz"], lip)
            if nd > slack:
                failures["nondegeneracy"] += 1
                witness = witness or {"check": "nondegeneracy", "X": X, "tau": tau}
            if lip > slack:
                failures["lipschitz"] += 1
                witness = witness or {"check": "lipschitz", "X": X, "Y": Y}
            if i < orderings:
                B = random_psd_bump(n, rng, magnitude=rng.uniform(0, 3))
                drop = fx - acdo_value(F, X + B, None, tol)
                worst["ellipticity"] = max(worst["ellipticity"], drop)
                if drop > slack:
                    failures["ellipticity"] += 1
                    witness = witness or {"check": "ellipticity", "X": X, "B": B}
        ok = not any(failures.values())
        passed &= ok
        details[name] = {"passed": ok, "max_violation": worst, "failures": failures, "witness": witness}
    return CriterionResult(1, "acdo nondegeneracy / 1-Lipschitz / ellipticity", passed, details)


def criterion_representations(seed=0, samples=1000, tol=TOL):
    """Sublevel and distance-difference representations agree with the acdo; Ascoli formula matches."""
    details = {}
    passed = True
    for k, (name, spec) in enumerate(CATALOG.items()):
        F = make_operator(spec)
        rng = np.random.default_rng([seed, 2, k])
        worst2 = worst4 = 0.0
        for _ in range(samples):
            X = _random_matrix(F.dim, rng)
            x = F.point(None)
            val = acdo_value(F, X, x, tol)
            sup_minus = ray_edge(F, X, x, MINUS, tol).t
            worst2 = max(worst2, abs(-sup_minus - val))
            rep4 = dist_to_level_set(F, X, x, MINUS, tol) - dist_to_level_set(F, X, x, PLUS, tol)
            worst4 = max(worst4, abs(rep4 - val))
        ok = worst2 <= 2 * tol and worst4 <= 2 * tol
        passed &= ok
        details[name] = {"passed": ok, "rep2_max_err": worst2, "rep4_max_err": worst4}

    spec = CATALOG["linear_constant"]
    F = make_operator(spec)
    A, f = np.asarray(spec.params["A"]), spec.params["f"]
    rng = np.random.default_rng([seed, 2, 99])
    worst = 0.0
    for _ in range(samples):
        Z = _random_matrix(F.dim, rng)
        bisect = dist_to_level_set(F, Z, None, PLUS, tol) + dist_to_level_set(F, Z, None, MINUS, tol)
        worst = max(worst, abs(ascoli_distance(A, f, Z) - bisect))
    ok = worst <= 1e-8
    passed &= ok
    details["ascoli"] = {"passed": ok, "max_err": worst}
    return CriterionResult(2, "acdo representations and Ascoli formula", passed, details)


def _random_shift_pair(rng):
    n = int(rng.integers(2, 5))
    X = random_sym(n, rng.uniform(0.1, 3), rng)
    delta = rng.uniform(0.01, 0.99) / max(op_norm(X), 1e-12)
    return X, delta


def criterion_matrix_inequalities(seed=0, samples=1000, directional=200):
    """Block inequality, resolvent lower bound, the rectangular Q1/Q2 bound and both directions of the equivalence."""
    rng = np.random.default_rng([seed, 3])
    block_worst = 0.0
    for _ in range(samples):
        X, delta = _random_shift_pair(rng)
        block_worst = max(block_worst, block_defect(BlockPair(X, resolvent_transform(X, delta), 1 / delta)))

    sm_worst = -np.inf
    for _ in range(samples):
        X, delta = _random_shift_pair(rng)
        m = int(rng.integers(1, 4))
        Q1 = rng.normal(size=(X.shape[0], m))
        Q2 = rng.normal(size=(X.shape[0], m))
        sm_worst = max(sm_worst, lemma_sm_defect(X, delta, Q1, Q2))

    xd_worst = np.inf
    for i in range(samples):
        X, delta = _random_shift_pair(rng)
        if i % 10 == 0:
            delta = 0.0
        xd_worst = min(xd_worst, resolvent_lower_defect(X, delta))

    forward_fail = reverse_fail = 0
    for _ in range(directional):
        X, delta = _random_shift_pair(rng)
        bump = random_psd_bump(X.shape[0], rng, magnitude=rng.uniform(0, 2)) if rng.uniform() < 0.7 else 0.0
        Y = resolvent_transform(X, delta) + bump
        alpha = (1 + rng.uniform(0, 1)) / delta
        if not forward_direction_check(BlockPair(X, Y, alpha)):
            forward_fail += 1
        if not reverse_direction_check(X, Y, alpha):
            reverse_fail += 1

    details = {
        "block_max_defect": block_worst,
        "lemma_sm_max_defect": sm_worst,
        "resolvent_lower_min_defect": xd_worst,
        "forward_failures": forward_fail,
        "reverse_failures": reverse_fail,
    }
    passed = (
        block_worst <= 1e-9 and sm_worst <= 1e-9 and xd_worst >= -1e-10 and forward_fail == 0 and reverse_fail == 0
    )
    return CriterionResult(3, "matrix inequalities", passed, details)


def criterion_autonomous_detector(seed=0, samples=500, tol=TOL):
    """Zero sup/inf gap for thin zero sets; a fat zero set yields two solutions with equal boundary data."""
    details = {}
    passed = True
    for k, name in enumerate(("laplacian", "max_eigenvalue", "monge_ampere")):
        F = make_operator(CATALOG[name])
        rng = np.random.default_rng([seed, 4, k])
        worst = max(abs(sup_inf_gap(F, _random_matrix(F.dim, rng), None, tol).gap) for _ in range(samples))
        ok = worst <= 2 * tol
        passed &= ok
        details[name] = {"passed": ok, "max_abs_gap": worst}

    P = make_operator(OperatorSpec("plateau", 2))
    g = sup_inf_gap(P, np.zeros((2, 2)), None, tol)
    pair = fat_zero_set_pair(P, np.zeros((2, 2)), None, tol)
    mismatch = pair.boundary_mismatch() if pair else np.inf
    ok = g.gap <= -0.9 and pair is not None and mismatch <= 1e-12 and pair.F_phi == 0 and pair.F_psi == 0
    passed &= ok
    details["plateau"] = {
        "passed": ok,
        "sup_minus": g.sup_minus,
        "inf_plus": g.inf_plus,
        "gap": g.gap,
        "eps": pair.eps if pair else None,
        "boundary_mismatch": mismatch,
    }
    return CriterionResult(4, "autonomous comparison detector", passed, details)


def criterion_condition_probe(seed=0, tol=TOL, pairs=40, samples_per_pair=40, workers=None):
    """Sup-excess tables: zero for autonomous operators, decaying for continuous data, stuck for the counterexample."""
    details = {}
    passed = True
    for name, spec in (
        ("laplacian", OperatorSpec("laplacian", 2)),
        ("max_eigenvalue", OperatorSpec("max_eigenvalue", 2)),
        ("monge_ampere_f1", OperatorSpec("monge_ampere", 2, {"f": 1.0})),
    ):
        rep = check_condition(make_operator(spec), CONDITION_X0, T_SCHEDULE, 10, 10, seed, tol, workers)
        ok = all(r.sup_excess <= 2 * tol for r in rep.rows)
        passed &= ok
        details[name] = {"passed": ok, "rows": [r.sup_excess for r in rep.rows]}

    F = make_operator(OperatorSpec("monge_ampere", 2, {"f0": 1.0, "f2": 1.0}))
    rep = check_condition(F, CONDITION_X0, T_SCHEDULE, pairs, samples_per_pair, seed, tol, workers)
    slope = rep.decay_slope()
    ok = slope >= 0.5 and rep.rows[-1].sup_excess <= 5e-2
    passed &= ok
    details["monge_ampere_1_plus_x2"] = {
        "passed": ok,
        "slope": slope,
        "final": rep.rows[-1].sup_excess,
        "rows": [r.sup_excess for r in rep.rows],
    }

    C = make_operator(OperatorSpec("counterexample_linear", 2))
    rep = check_condition(C, CONDITION_X0, T_SCHEDULE, pairs, samples_per_pair, seed, tol, workers)
    floor = min(r.sup_excess for r in rep.rows)
    ok = floor >= COUNTEREXAMPLE_FLOOR
    passed &= ok
    details["counterexample_linear"] = {
        "passed": ok,
        "min_row": floor,
        "frozen_floor": COUNTEREXAMPLE_FLOOR,
        "rows": [r.sup_excess for r in rep.rows],
    }
    return CriterionResult(5, "continuity condition probe", passed, details)


def certificate_checks(cert):
    """Pass/fail flags for a counterexample certificate at the exit-criterion tolerances."""
    axis = cert["axis_check_results"]
    return {
        "boundary": cert["boundary_min_gap"] >= -1e-12,
        "interior_gap": abs(cert["interior_max_gap"] - ce.GAP_MAX) <= 1e-9,
        "interior_argmax": abs(cert["argmax_x"] - ce.GAP_ARGMAX) <= 1e-6,
        "residual": cert["residual_stats"]["max_abs"] <= 1e-12,
        "rank_one": cert["rank_one_max_error"] <= 1e-14,
        "axis_x": axis[ce.ABOVE_X_AXIS]["passed"] and axis[ce.ABOVE_X_AXIS]["accepted"] >= 100,
        "axis_y": axis[ce.BELOW_Y_AXIS]["passed"] and axis[ce.BELOW_Y_AXIS]["accepted"] >= 100,
        "touch_interior": not cert["touching_quadratic"]["touch_on_boundary"],
        "comparison_violated": cert["comparison_violated"],
    }


def criterion_counterexample(seed=0, grid=256):
    """Certificate that comparison fails for the rank-one linear equation."""
    cert = ce.certificate(grid=grid, seed=seed)
    checks = certificate_checks(cert)
    return CriterionResult(6, "counterexample certificate", all(checks.values()), {"checks": checks, "certificate": cert})


def _suite_bytes(seed, workers=None, first=None):
    results = first if first is not None else [c(seed=seed) for c in CRITERIA[:-1]]
    if workers is not None:
        results = [r if r.id != 5 else criterion_condition_probe(seed=seed, workers=workers) for r in results]
    return report_json(results)


def criterion_determinism(seed=0, first=None):
    """Identical seeds give byte-identical reports, independent of the worker count.

    ``first`` may hold already computed results of criteria 1-6 for ``seed``;
    the suite is then run only once more.
    """
    a = _suite_bytes(seed, first=first)
    b = _suite_bytes(seed)
    c = _suite_bytes(seed, workers=2, first=first)
    details = {"repeat_identical": a == b, "workers_identical": a == c, "bytes": len(a)}
    return CriterionResult(7, "determinism", a == b == c, details)


CRITERIA = (
    criterion_acdo_properties,
    criterion_representations,
    criterion_matrix_inequalities,
    criterion_autonomous_detector,
    criterion_condition_probe,
    criterion_counterexample,
    criterion_determinism,
)


def run_suite(seed=0, only=None):
    """Run every criterion (or the ids in ``only``) and return the results in order."""
    results = []
    for k, crit in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        if k == 7 and len(results) == 6:
            results.append(crit(seed=seed, first=list(results)))
        else:
            results.append(crit(seed=seed))
    return results


def report_json(results):
    payload = {
        "passed": all(r.passed for r in results),
        "criteria": [r.to_dict() for r in results],
    }
    return json.dumps(payload, sort_keys=True, indent=2)
