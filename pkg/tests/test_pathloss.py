"""Link-budget helpers; references evaluated with scipy.special.jv and by hand."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from satlink_irs import pathloss as pl


def reference_link(**kw):
    base = dict(wavelength_m=pl.wavelength(5e9), g_max=pl.db_to_linear(56.0), phi_sh_deg=0.4,
                phi_3db_deg=0.8, g_hap=30.0, d_sh_m=35766e3)
    base.update(kw)
    return pl.SatHapLink(**base)


def test_beam_gain_reference():
    assert pl.beam_u(0.4, 0.8) == pytest.approx(1.0356402378220604, rel=1e-14)
    assert pl.satellite_beam_gain(reference_link()) == pytest.approx(336225.80165516207, rel=1e-10)


def test_beam_gain_boresight_limit():
    link = reference_link(phi_sh_deg=0.0)
    assert pl.satellite_beam_gain(link) == pytest.approx(link.g_max, rel=1e-14)


def test_beam_gain_monotone_inside_main_lobe():
    g = [pl.satellite_beam_gain(reference_link(phi_sh_deg=p)) for p in np.linspace(0.01, 0.8, 40)]
    assert np.all(np.diff(g) < 0)
    assert max(g) < reference_link().g_max


def test_pl_sat_hap_reference_and_scaling():
    link = reference_link()
    assert pl.pl_sat_hap(link) == pytest.approx(1.4724190924676253, rel=1e-10)
    far = reference_link(d_sh_m=2 * link.d_sh_m)
    assert pl.pl_sat_hap(far) == pytest.approx(0.5 * pl.pl_sat_hap(link), rel=1e-14)
    big = reference_link(g_hap=120.0)
    assert pl.pl_sat_hap(big) == pytest.approx(2.0 * pl.pl_sat_hap(link), rel=1e-14)


def test_fspl_and_terrestrial():
    assert pl.fspl_db(5.0, 1.0) == pytest.approx(106.42940, abs=1e-4)
    bare = pl.TerrestrialLink(0.0, 0.0, 1.0, 1.0)
    assert pl.pl_terrestrial_db(bare) == pytest.approx(-92.45, abs=1e-12)
    table = pl.TerrestrialLink(0.0, 0.0, 5.0, 20.0, 0.01, 5.4e-3, 2.0)
    assert pl.pl_terrestrial_db(table) == pytest.approx(-134.758, abs=1e-3)


@given(d=st.floats(0.01, 500), f=st.floats(0.1, 100))
def test_terrestrial_decreasing(d, f):
    a = pl.pl_terrestrial_db(pl.TerrestrialLink(10, 0, f, d, 0.01, 0.005, 1))
    b = pl.pl_terrestrial_db(pl.TerrestrialLink(10, 0, f, d * 1.1, 0.01, 0.005, 1))
    c = pl.pl_terrestrial_db(pl.TerrestrialLink(10, 0, f * 1.1, d, 0.01, 0.005, 1))
    assert b < a and c < a


def test_irs_user_reference_and_scaling():
    link = pl.IrsUserLink(300.0, 1.0, 2.0, 50.0, 5.0)
    assert pl.pl_irs_user_db(link) == pytest.approx(-48.11575005870594, abs=1e-10)
    d2 = pl.IrsUserLink(600.0, 1.0, 2.0, 50.0, 5.0)
    assert pl.pl_irs_user_db(link) - pl.pl_irs_user_db(d2) == pytest.approx(12.0412, abs=1e-4)
    h2 = pl.IrsUserLink(300.0, 1.0, 2.0, 100.0, 5.0)
    assert pl.pl_irs_user_db(h2) - pl.pl_irs_user_db(link) == pytest.approx(6.0206, abs=1e-4)


def test_average_snr():
    n0 = reference_link().noise_power_w
    assert pl.average_snr(30.0, 1.0, n0) == pytest.approx(12077294685990.338, rel=1e-12)
    assert pl.average_snr(40.0, 1.0, n0) / pl.average_snr(30.0, 1.0, n0) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        pl.average_snr(30.0, -1.0, n0)


@given(x=st.floats(-200, 200))
def test_db_round_trip(x):
    assert pl.linear_to_db(pl.db_to_linear(x)) == pytest.approx(x, abs=1e-12)
    assert pl.watt_to_dbm(pl.dbm_to_watt(x)) == pytest.approx(x, abs=1e-12)


def test_invalid_links():
    with pytest.raises(ValueError):
        reference_link(phi_sh_deg=95.0)
    with pytest.raises(ValueError):
        reference_link(d_sh_m=0.0)
    with pytest.raises(ValueError):
        pl.TerrestrialLink(0, 0, 5, -1)
    with pytest.raises(ValueError):
        pl.IrsUserLink(300, 1, 2, 0, 5)
    with pytest.raises(ValueError):
        pl.linear_to_db(-1.0)
