import numpy as np
import pytest

from cqed_stirap import units
from cqed_stirap.config import axis_to_config_units, load_config, parse_config_text, build_run_config
from cqed_stirap.cqed import SystemParams
from cqed_stirap.errors import ConfigError
from cqed_stirap.experiments import ProtocolConfig


def cfg(text):
    return build_run_config(parse_config_text(text))


def test_defaults_match_reference_point():
    run = load_config()
    assert run.protocol == ProtocolConfig()
    assert run.protocol.system == SystemParams.reference()
    assert run.sweep is None


def test_full_config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("""
[system]
omega_q_ghz = 5.0
kappa_mhz = 3.0   # cavity
n_max = 12
[pulses]
omega_p_mhz = 20
t_s_ns = -25
[drive]
delta_1_mhz = 1.5
cd_enabled = yes
cd_scale = 0.5
[integrator]
t0_ns = -50
tf_ns = 50
dt_ns = 0.02
[sweep]
axis1 = sigma
axis1_values = linspace(10, 30, 3)
axis2 = delta_2
axis2_values = -1, 0, 1
metric = max_p2
""")
    run = load_config(path)
    p = run.protocol
    assert p.system.n_max == 12
    assert p.schedule.omega_p == units.from_mhz(20.0)
    assert p.schedule.t_s == -25.0
    assert p.drive.delta_1 == units.from_mhz(1.5)
    assert p.drive.cd_enabled and p.drive.cd_scale == 0.5
    assert p.integrator.dt == 0.02
    assert run.sweep.metric == "max_p2"
    np.testing.assert_array_equal(run.sweep.axis1[1], [10.0, 20.0, 30.0])
    np.testing.assert_allclose(axis_to_config_units("delta_2", run.sweep.axis2[1]), [-1, 0, 1], atol=1e-15)
    assert run.source == str(path)


def test_manual_rates():
    p = cfg("[system]\nrates_source = manual\ngamma_31_mhz = 1\ngamma_32_mhz = 2\ngamma_21_mhz = 3\n").protocol
    assert p.manual_rates == tuple(units.from_mhz(x) for x in (1.0, 2.0, 3.0))
    with pytest.raises(ConfigError, match="gamma_21_mhz"):
        cfg("[system]\nrates_source = manual\ngamma_31_mhz = 1\ngamma_32_mhz = 2\n")
    with pytest.raises(ConfigError):
        cfg("[system]\nrates_source = fitted\n")


@pytest.mark.parametrize("text, fragment", [
    ("[system]\nkapa_mhz = 3\n", "unknown key [system] kapa_mhz (line 2)"),
    ("[sytem]\n", "unknown section"),
    ("[system]\nkappa_mhz = -3\n", "kappa_mhz (line 2) must be >= 0"),
    ("[pulses]\n\nsigma_ns = 0\n", "sigma_ns (line 3) must be > 0"),
    ("[pulses]\nsigma_ns = abc\n", "bad value"),
    ("[drive]\ncd_enabled = maybe\n", "expected true/false"),
    ("[integrator]\ndt_ns = 0.003\n", "does not divide"),
    ("[sweep]\naxis1 = sigma\naxis1_values = \naxis2 = delta_1\naxis2_values = 0\n", "empty"),
    ("[sweep]\naxis1 = width\naxis1_values = 1\naxis2 = delta_1\naxis2_values = 0\n", "not one of"),
    ("[sweep]\naxis1 = sigma\naxis1_values = 1\n", "axis2"),
    ("[sweep]\naxis1 = sigma\naxis1_values = -1\naxis2 = delta_1\naxis2_values = 0\n", "sigma values"),
    ("[sweep]\naxis1 = sigma\naxis1_values = 1\naxis2 = sigma\naxis2_values = 2\n", "must differ"),
    ("[sweep]\naxis1 = sigma\naxis1_values = 1\naxis2 = delta_1\naxis2_values = 0\nmetric = p3\n", "metric"),
    ("[system]\nomega_q_ghz = 5\nomega_q_ghz = 6\n", "parse error"),
    ("no section\n", "parse error"),
    ("[DEFAULT]\nx = 1\n", "DEFAULT"),
    ("[system]\nomega_q_ghz = nan\n", "finite"),
])
def test_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=None) as info:
        cfg(text)
    assert fragment in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")
