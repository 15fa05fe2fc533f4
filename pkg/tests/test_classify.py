import json

import numpy as np
import pytest

from psi_lab.basis import IndexWindow, scales_meeting
from psi_lab.classify import (FUNCTION_LAMBDAS, SEQUENCE_NAMES, TableVerdict, classify_coeffs,
                              classify_function, coherence_check)
from psi_lab.corpus import FLAGS, PRIMED, UNPRIMED, corpus, get_entry
from psi_lab.transform import CoeffArray, analyze

FUNCTION_ENTRIES = [e for e in corpus() if e.side == "function"]


def _closed(flags):
    for chain in (UNPRIMED, PRIMED):
        for small, big in zip(chain[:-1], chain[1:]):
            if flags[small] and not flags[big]:
                return False
    return True


@pytest.mark.parametrize("entry", FUNCTION_ENTRIES, ids=lambda e: e.id)
def test_function_side_matches_expected(entry):
    v = classify_function(entry.function)
    assert v.status == "ok"
    assert v.flags == entry.expected
    assert v.lattice_ok() and _closed(v.flags)


def test_unit_vector_has_every_unprimed_flag():
    w = IndexWindow(-4, 4, 64)
    v = classify_coeffs(CoeffArray.unit(w, 0, 0))
    assert all(v.flags[f] for f in UNPRIMED)
    assert all(v.flags[f] for f in PRIMED)
    assert v.status == "ok"


def test_scale_invariance(meyer):
    c = analyze(get_entry("exp_two_sided").function, meyer, IndexWindow(-4, 4, 128))
    base = classify_coeffs(c).flags
    assert classify_coeffs(c.scaled(1e6)).flags == base
    assert classify_coeffs(c.scaled(1e-6)).flags == base


def test_bump_rows_vanish_off_its_scales(meyer):
    w = IndexWindow(-6, 6, 256)
    c = analyze(get_entry("bump12").function, meyer, w)
    meeting = set(scales_meeting(meyer, (1.0, 2.0)))
    for j in w.js:
        if int(j) not in meeting:
            assert not np.any(c.row(j)), j
    v = classify_coeffs(c)
    assert v.flags["D"] and v.flags["E'"]


def test_growing_rows_leave_s():
    # rows growing like |k| are tempered but not rapidly decreasing
    w = IndexWindow(-2, 2, 64)
    values = np.zeros(w.shape, dtype=complex)
    values[w.row(0)] = 1.0 + np.abs(w.ks)
    v = classify_coeffs(CoeffArray(w, values))
    assert not v.flags["E"] and v.flags["D'"] and v.flags["E'"]


def test_exponential_j_growth_is_not_tempered():
    # 4^{|j|} growth: rows in s but no lambda in the grid controls it
    w = IndexWindow(-6, 6, 8)
    values = np.zeros(w.shape, dtype=complex)
    values[:, w.col(0)] = 4.0 ** np.abs(w.js) * 1.0
    v = classify_coeffs(CoeffArray(w, values), lams=(-1.0, -0.5, 0.5, 1.0))
    assert v.flags["E"] and not v.flags["O_M"]


def test_point_masses_coefficient_pattern(meyer):
    w = IndexWindow(-4, 4, 128)
    for entry in corpus():
        if entry.id.startswith("delta"):
            v = classify_coeffs(analyze(entry.function, meyer, w))
            assert v.flags == entry.expected_coeff
            fv = classify_function(entry.function)
            assert not any(fv.flags[f] for f in UNPRIMED)


def test_coherence_report_serialises(meyer):
    rep = coherence_check(get_entry("sqrt").function, meyer, IndexWindow(-4, 4, 128))
    assert rep.consistent
    data = json.loads(json.dumps(rep.to_dict(), default=float))
    assert set(data) == {"consistent", "violations", "function", "coefficients"}


def test_coherence_flags_a_missing_flag(meyer):
    # a window too narrow for sin(x^2) loses O_M on the array side
    rep = coherence_check(get_entry("sinx2").function, meyer, IndexWindow(-4, 4, 128))
    assert not rep.consistent
    assert {v["flag"] for v in rep.violations} >= {"O_M"}
    assert all(v["sequence_space"] == SEQUENCE_NAMES[v["flag"]] for v in rep.violations)


def test_verdict_records_limits_and_json():
    v = classify_function(get_entry("bump12").function, ns=(0, 1))
    assert v.limits["grids"]["n"] == [0, 1]
    assert len(v.limits["grids"]["lambda"]) == len(FUNCTION_LAMBDAS)
    data = json.loads(v.to_json())
    assert set(data["flags"]) == set(FLAGS)
    assert isinstance(v, TableVerdict) and v.set_flags == list(FLAGS)
