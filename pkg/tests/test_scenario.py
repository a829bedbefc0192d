"""Scenario schema: strict parsing, validation, round trips, and overrides."""

import dataclasses

import pytest
import yaml

from photonbundles.cli import bundled_scenario_names, resolve_scenario
from photonbundles.errors import ParseError, ValidationError
from photonbundles.scenario import (
    apply_overrides,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_hash,
)

MINIMAL = """
name: toy
kind: master
model:
  omega_b: -6.0
  coupling: 0.6
space:
  n_fock: 12
target:
  mediator: 0
  seed_occupation: 0
  pairs_per_cycle: 1
pulses:
  amp_first: 0.008
  amp_ratio: 6.8538
  center_first: 796.0
  center_second: 576.0
  width: 220.0
  period: 84000.0
decay:
  cavity: 1.0e-4
  upper: 1.0e-4
  lower: 1.0e-4
run:
  initial_state: b0
  seed: 3
"""


def write(tmp_path, text, name="toy.scenario"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_scenario_loads(tmp_path):
    s = load_scenario(write(tmp_path, MINIMAL))
    assert s.name == "toy"
    assert s.kind == "master"
    assert s.model.coupling == 0.6
    assert s.space.n_fock == 12
    assert s.target.bundle_size == 2
    assert s.decay.a == 1e-4
    assert s.seed == 3


def test_kind_dependent_defaults(tmp_path):
    s = load_scenario(write(tmp_path, MINIMAL))
    assert s.resolved_cycles == 3  # reloading figures span three drive cycles
    s2 = apply_overrides(s, {"kind": "correlators"})
    assert s2.resolved_cycles == 1
    s3 = apply_overrides(s, {"run.cycles": 5})
    assert s3.resolved_cycles == 5


def test_unknown_keys_rejected(tmp_path):
    bad = MINIMAL + "\nunexpected: 1\n"
    with pytest.raises(ParseError, match="unexpected"):
        load_scenario(write(tmp_path, bad))
    bad2 = MINIMAL.replace("  coupling: 0.6", "  coupling: 0.6\n  couplingg: 0.7")
    with pytest.raises(ParseError, match="couplingg"):
        load_scenario(write(tmp_path, bad2))


def test_negative_decay_rejected(tmp_path):
    bad = MINIMAL.replace("cavity: 1.0e-4", "cavity: -1.0e-4")
    with pytest.raises(ValidationError):
        load_scenario(write(tmp_path, bad))


def test_malformed_yaml_reports_location(tmp_path):
    with pytest.raises(ParseError, match="line"):
        load_scenario(write(tmp_path, "name: [unclosed\nkind: master\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ParseError, match="not found"):
        load_scenario(tmp_path / "absent.scenario")


def test_missing_section_named(tmp_path):
    bad = MINIMAL.replace("space:\n  n_fock: 12\n", "")
    with pytest.raises(ParseError, match="space"):
        load_scenario(write(tmp_path, bad))


def test_wrong_type_named(tmp_path):
    bad = MINIMAL.replace("n_fock: 12", "n_fock: twelve")
    with pytest.raises(ParseError, match="n_fock"):
        load_scenario(write(tmp_path, bad))


def test_round_trip_is_field_identical(tmp_path):
    s = load_scenario(write(tmp_path, MINIMAL))
    out = tmp_path / "resaved.scenario"
    save_scenario(s, out)
    s2 = load_scenario(out)
    assert s == s2
    assert scenario_hash(s) == scenario_hash(s2)


def test_overrides_are_validated(tmp_path):
    s = load_scenario(write(tmp_path, MINIMAL))
    with pytest.raises(ParseError):
        apply_overrides(s, {"pulses.width": "wide"})
    with pytest.raises(ValidationError):
        apply_overrides(s, {"decay.cavity": -2.0})
    s2 = apply_overrides(s, {"pulses.width": 300.0, "space.n_fock": 16})
    assert s2.width == 300.0
    assert s2.space.n_fock == 16
    # original untouched
    assert s.width == 220.0


def test_override_changes_hash(tmp_path):
    s = load_scenario(write(tmp_path, MINIMAL))
    s2 = apply_overrides(s, {"run.seed": 4})
    assert scenario_hash(s) != scenario_hash(s2)


def test_coeff_sweep_requires_sweep_section():
    doc = yaml.safe_load(MINIMAL)
    doc["kind"] = "coeff-sweep"
    doc.pop("target")
    doc.pop("pulses")
    with pytest.raises(ValidationError, match="sweep"):
        scenario_from_dict(doc)


def test_unknown_kind_rejected():
    doc = yaml.safe_load(MINIMAL)
    doc["kind"] = "masterful"
    with pytest.raises(ValidationError, match="masterful"):
        scenario_from_dict(doc)


def test_parity_pairing_enforced_in_target():
    doc = yaml.safe_load(MINIMAL)
    doc["target"]["mediator"] = 1  # seed occupation stays 0
    with pytest.raises(ValidationError):
        scenario_from_dict(doc)


class TestBundledScenarios:
    def test_all_bundled_files_load(self):
        names = bundled_scenario_names()
        assert {"two_photon", "three_photon", "four_photon", "six_photon", "fig2_sweep"} <= set(names)
        for name in names:
            s = resolve_scenario(name)
            assert s.name == name

    def test_two_photon_published_ratio(self):
        s = resolve_scenario("two_photon")
        assert s.amp_ratio == 6.8538
        assert s.kind == "master"
        assert s.decay.a == 1e-4

    def test_unknown_name_lists_alternatives(self):
        with pytest.raises(ParseError, match="two_photon"):
            resolve_scenario("no_such_thing")
