import pytest

from hamdisc.ledger import Ledger, load_ledger, parse_ledger


def test_shipped_ledger_matches_defaults():
    assert load_ledger() == Ledger()


def test_overlay(tmp_path):
    f = tmp_path / "l.cfg"
    f.write_text("beta = 0.25  # smaller\nn_values = 24,36\n")
    led = load_ledger(f)
    assert led.beta == 0.25 and led.n_values == (24, 36) and led.k == 3


def test_unknown_key():
    with pytest.raises(ValueError):
        parse_ledger("zzz = 1")


def test_caps_and_target():
    led = Ledger()
    assert led.caps(10) == pytest.approx([10.0, 1.0, 0.1])
    assert led.disc_target_for(50) == pytest.approx(1.0)
