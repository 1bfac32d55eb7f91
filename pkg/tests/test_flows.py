from hypothesis import given, strategies as st

from flowsift import Label, parse_label


def test_canonical_botnet_label():
    assert parse_label("flow=From-Botnet-V42-UDP-DNS") is Label.BOTNET


def test_background_is_benign():
    assert parse_label("flow=Background-TCP-Established") is Label.BENIGN


def test_normal_is_benign():
    assert parse_label("flow=To-Normal-V42-UDP") is Label.BENIGN


def test_empty_label_is_benign():
    assert parse_label("") is Label.BENIGN


def test_case_insensitive():
    assert parse_label("BOTNET") is Label.BOTNET
    assert parse_label("BoTnEt traffic") is Label.BOTNET


@given(st.text(max_size=60))
def test_total_and_case_insensitive(s):
    assert parse_label(s) is parse_label(s.upper())
    assert parse_label(s) in (Label.BENIGN, Label.BOTNET)


@given(st.text(max_size=60))
def test_substring_rule(s):
    assert parse_label(s) is (
        Label.BOTNET if "botnet" in s.lower() else Label.BENIGN
    )
