"""Configuration parsing, validation diagnostics and overrides."""
import json

import numpy as np
import pytest

from hyperint.config import CHECK_NAMES, DEFAULT_CHECKS, load_config, parse_config
from hyperint.errors import ConfigError
from hyperint.surface import EllipticK3, NeumannRational, RationalElliptic


def K3_RAW():
    g = [[1, 0]] + [0] * 11 + [[1, 0]]
    return {"family": {"tag": "EllipticK3", "f": [], "g": g}, "instance": {"seed": 42}}


def test_minimal_k3():
    rc = parse_config(K3_RAW())
    assert rc.tag == "EllipticK3" and rc.seed == 42
    assert isinstance(rc.family, EllipticK3)
    assert rc.checks == DEFAULT_CHECKS
    assert rc.settings.rel_tol == 1e-10 and rc.fd_step == 1e-5


def test_complex_encoding():
    raw = {"family": {"tag": "RationalElliptic", "f": [[0, 1], 2.5], "g": [1], "c": [0.5, -0.5]}}
    rc = parse_config(raw)
    assert isinstance(rc.family, RationalElliptic)
    assert rc.family.f.coeffs[0] == 1j and rc.family.f.coeffs[1] == 2.5


def test_tag_only_is_random():
    rc = parse_config({"family": {"tag": "DoubleCoverK3"}, "instance": {"seed": 3}})
    assert rc.family is None
    a, b = rc.instance(), rc.instance()
    assert np.array_equal(a.u, b.u)


def test_neumann_section_implies_family():
    rc = parse_config({"neumann": {"c": [1, 2, 3], "r": 2}})
    assert rc.tag == "NeumannRational"
    assert isinstance(rc.family, NeumannRational) and rc.family.r == 2


@pytest.mark.parametrize("raw, fragment", [
    ({}, "family: missing"),
    ({"family": {"tag": "Nope"}}, "family.tag"),
    ({"family": {"tag": "EllipticK3", "f": list(range(10))}}, "family.f: degree 9 exceeds 8"),
    ({"family": {"tag": "EllipticK3", "g": [1] * 14}}, "family.g"),
    ({"family": {"tag": "RationalElliptic", "f": [1], "g": [1]}}, "family.c"),
    ({"family": {"tag": "EllipticK3", "f": [[1, 2, 3]]}}, "family.f[0]"),
    ({"family": {"tag": "EllipticK3", "f": [True]}}, "family.f[0]"),
    ({"family": {"tag": "DoubleCoverK3", "F2": [[1] * 8]}}, "family.F2: total degree"),
    ({"family": {"tag": "SeibergWitten", "Lambda": 1, "Nc": 2.5}}, "family.Nc"),
    ({"family": {"tag": "DoubleCoverK3"}, "instance": 3}, "instance: expected an object"),
    ({"family": {"tag": "DoubleCoverK3"}, "instance": {"seed": -1}}, "instance.seed"),
    ({"family": {"tag": "DoubleCoverK3"}, "instance": {}}, "instance: give either"),
    ({"family": {"tag": "DoubleCoverK3"}, "instance": {"u": [1, 2], "xs": [0, 1], "signs": [1, 1]}},
     "explicit family coefficients"),
    ({"family": {"tag": "NeumannRational", "c": [1, 2, 3]},
      "instance": {"u": [1], "xs": [0.5], "signs": [1]}}, "instance.u: need 2 entries"),
    ({"family": {"tag": "NeumannRational", "c": [1, 2, 3]},
      "instance": {"u": [1, 2], "xs": [0.5, 1], "signs": [1, 0]}}, "instance.signs"),
    ({"family": {"tag": "DoubleCoverK3"}, "tolerances": {"rel_tol": -1}}, "tolerances.rel_tol"),
    ({"family": {"tag": "DoubleCoverK3"}, "tolerances": {"thresholds": {"bogus": 1}}},
     "tolerances.thresholds.bogus"),
    ({"family": {"tag": "DoubleCoverK3"}, "checks": ["roundtrip", "bogus"]}, "checks[1]"),
    ({"family": {"tag": "DoubleCoverK3"}, "flow": {"m": 1.5}}, "flow.m"),
    ({"family": {"tag": "DoubleCoverK3"}, "extra": 1}, "unknown field(s) extra"),
    ({"neumann": {"c": [1, 1]}}, "neumann.c"),
    ({"neumann": {"c": [1, 2], "q0": [1, 0]}}, "both q0 and p0"),
    ({"neumann": {"c": [1, 2], "q0": [1, 0, 0], "p0": [0, 1, 0]}}, "neumann.q0: need 2"),
    ({"neumann": {"c": [1, 2], "r": 0}}, "neumann.r"),
])
def test_config_errors_name_the_field(raw, fragment):
    with pytest.raises(ConfigError) as ei:
        parse_config(raw)
    assert fragment in str(ei.value)


def test_json_syntax_error_has_line_and_column(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"family":\n {"tag": "EllipticK3",}}')
    with pytest.raises(ConfigError, match=r"line 2, column \d+"):
        load_config(p)


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "k3.json"
    p.write_text(json.dumps(K3_RAW()))
    rc = load_config(p)
    assert rc.raw == K3_RAW()


def test_overrides():
    rc = parse_config({"family": {"tag": "DoubleCoverK3"}, "instance": {"seed": 1},
                       "tolerances": {"scale": 2.0}})
    rc2 = rc.with_overrides(seed=7, tol_scale=10.0)
    assert rc2.seed == 7
    assert rc2.settings.rel_tol == pytest.approx(10 * rc.settings.rel_tol)
    assert rc.seed == 1  # original untouched
    with pytest.raises(ConfigError):
        rc.with_overrides(tol_scale=0.0)


def test_seed_override_reaches_neumann_section():
    rc = parse_config({"neumann": {"c": [1, 2], "seed": 3}}).with_overrides(seed=9)
    assert rc.neumann["seed"] == 9


def test_threshold_lookup():
    rc = parse_config({"family": {"tag": "DoubleCoverK3"},
                       "tolerances": {"thresholds": {"roundtrip": 1e-3}}})
    assert rc.threshold("roundtrip") == 1e-3
    assert rc.threshold("involutivity") == 1e-9


def test_default_checks_are_known():
    assert set(DEFAULT_CHECKS) <= set(CHECK_NAMES)
