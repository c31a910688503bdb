import pytest

from stablesets import frames as fr
from stablesets import suites
from stablesets.errors import InputError, SignatureMismatch
from stablesets.polarity import non_identity_polarity, polarity_to_json


def test_galois_small_sweep():
    rep = suites.galois_sweep(2, 2)
    assert rep["status"] == "pass" and rep["polarities"] == 2 + 4 + 4 + 16


def test_ortho_sweep_splits_symmetric_and_transitive():
    rep = suites.ortho_sweep(max_n=3, max_rel_n=2)
    checks = rep["checks"]
    assert checks["non_identity_boolean"]["ok"]
    assert checks["irreflexive_symmetric"]["ok"]
    assert not checks["irreflexive_transitive"]["ok"]
    assert checks["irreflexive_transitive"]["failures"]


def test_lambek_report_on_non_frame():
    P = non_identity_polarity(2)
    F = fr.lambek_frame(P, [(0, 0, 0)])
    rep = suites.lambek_report(F)
    assert rep["checks"]["class_predicates_fo_agree"]["ok"]
    assert rep["status"] == ("pass" if fr.is_lambek_frame(F) else "fail")


def test_modal_report_options_recorded():
    opts = suites.SuiteOptions(mode="sampled", seed=4, samples=10)
    rep = suites.modal_report(fr.identity_modal_frame(3), opts)
    assert rep["status"] == "pass" and rep["options"] == {"mode": "sampled", "seed": 4, "samples": 10}


def test_los_trials_deterministic():
    assert suites.los_trials(20, seed=1) == suites.los_trials(20, seed=1)


def test_run_suite_validation():
    with pytest.raises(InputError):
        suites.run_suite("nope", {})
    with pytest.raises(InputError):
        suites.run_suite("modal", [])
    with pytest.raises(InputError):
        suites.run_suite("galois", {"sweep": {"bogus": 1}})
    with pytest.raises(InputError):
        suites.run_suite("fhom", {"factors": []})
    with pytest.raises(InputError):
        suites.run_suite("fhom", {"factors": [polarity_to_json(non_identity_polarity(2))]})
    mixed = [polarity_to_json(fr.identity_modal_frame(2)),
             polarity_to_json(fr.handcrafted_lambek_frames()["m2-squared-join"])]
    with pytest.raises(SignatureMismatch):
        suites.run_suite("fhom", {"factors": mixed})


def test_fhom_single_ultrafilter():
    frames_ = [polarity_to_json(F) for F in fr.random_modal_frames(2, seed=2, max_x=3, max_y=3)]
    rep = suites.run_suite("fhom", {"factors": frames_, "ultrafilter": 1})
    assert rep["status"] == "pass" and list(rep["ultrafilters"]) == ["U1"]
