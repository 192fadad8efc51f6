import math
import os
import subprocess

import pytest

import optomech as om


def lorentz_params():
    p = om.SystemParams()
    p.Omega = 1.0
    p.kappa = 0.1
    p.Gamma = 1e-3
    return p


def test_version():
    assert om.__version__


def test_rate_ladder():
    r = om.derive_rates(g0=1.0, omega=1.0, Omega=1.0, x_zp=1e-3, cavity_length=1.0)
    assert r.g2 / r.g1 == pytest.approx(math.pi**2 / 12 + 1 / 16, rel=1e-12)
    assert r.beta_plus == pytest.approx(r.g1 / r.g2 + 1)


def test_cubic_steady_lorentzian_limit():
    p = lorentz_params()
    p.detuning = 0.3
    s = om.solve_cubic_steady(p, 0.2)
    assert s.n_bar == pytest.approx(0.04 / (0.09 + 0.0025), rel=1e-12)
    assert s.residual < 1e-12


def test_quadratic_saturation():
    p = lorentz_params()
    p.g1 = 1e-3
    p.g2 = 5e-4
    s = om.solve_quadratic_steady(p, 1e6 * p.g1)
    assert s.n_bar == pytest.approx(1 / 1.5, rel=1e-4)


def test_system_and_spectrum():
    p = lorentz_params()
    p.g0 = 1e-3
    p.detuning = -1.0
    p.alpha = 0.5
    sys = om.build_system("first_order", p)
    assert sys.dim() == 4
    eig, max_real, stable = om.stability(sys)
    assert stable and max_real < 0
    grid = om.sideband_grid(sys, p.Omega)
    S = om.output_psd(sys, grid, om.NoiseOrdering.symmetrized)
    assert len(S) == len(grid)
    assert all(v >= 0 for v in S)
    dr, db, dO = om.sideband_analysis(grid, S, p.Omega, p.kappa)
    assert math.isfinite(dO)


def test_closure():
    closed, res = om.verify_basis_closure("quadratic_six")
    assert closed and res < 1e-10
    closed, _ = om.verify_basis_closure("reduced_second_order")
    assert not closed


def test_errors_map_to_python():
    p = lorentz_params()
    p.kappa = -1.0
    with pytest.raises(om.ValidationError):
        p.validate()
    with pytest.raises(om.ValidationError):
        om.welch_psd([0j] * 10, 0.1, 8)


def test_semiclassical_free_decay():
    p = lorentz_params()
    out = om.integrate_semiclassical(p, T=700.0, dt=0.01, seed=3, noise=False)
    assert abs(out["a"][-1]) < 1e-12


def test_cli_in_process():
    code, out, err = om.run_cli(["--help"])
    assert code == 0
    code, out, err = om.run_cli(["no-such-command"])
    assert code == 1


def test_cli_binary(tmp_path):
    exe = os.environ.get("OPTOMECH_CLI")
    if not exe:
        pytest.skip("OPTOMECH_CLI not set")
    cfg = tmp_path / "c.toml"
    cfg.write_text("[params]\nOmega = 1\nkappa = 0.1\ndetuning = 0.3\nalpha = 0.2\n")
    r = subprocess.run([exe, "steady", "-c", str(cfg)], capture_output=True, text=True)
    assert r.returncode == 0
    assert "n_bar" in r.stdout
    cfg.write_text("[params]\nOmega = 1\nkappa = 3\n")
    r = subprocess.run([exe, "sideband", "-c", str(cfg)], capture_output=True, text=True)
    assert r.returncode == 2
