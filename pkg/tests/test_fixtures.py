import pytest

from condense.expr import DigitMultiset, evaluate, leaves, parse, render
from condense.fixtures import load_fixtures, parse_fixtures

FIXTURES = load_fixtures()


def test_fixture_file_shape():
    tags = {f.tag for f in FIXTURES}
    assert tags == {"intro", "thirteen", "hundred", "one-from-four", "seven-nines", "selfcondense"}
    assert len(FIXTURES) == 30


@pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f"{f.tag}:{f.text}")
def test_fixture_replays(fx):
    assert evaluate(fx.expr) == fx.expected
    assert leaves(fx.expr) == fx.digits


@pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f"{f.tag}:{f.text}")
def test_fixture_render_round_trip(fx):
    assert parse(render(fx.expr)) == fx.expr


def test_key_fixtures_present():
    texts = {f.text for f in FIXTURES}
    assert "(4+4/4)!/4" in texts and "(2+1^8)^7" in texts
    hundreds = [f for f in FIXTURES if f.tag == "hundred"]
    assert sorted({next(iter(f.digits.support())) for f in hundreds}) == [2, 4, 5, 7, 9]


def test_parse_fixtures_rejects_bad_records():
    good = "# condense witness fixtures v1\nintro ; 2+3 ; 5 ; 23\n"
    (fx,) = parse_fixtures(good)
    assert fx.digits == DigitMultiset.of([2, 3])
    with pytest.raises(ValueError):
        parse_fixtures("# condense witness fixtures v1\nintro ; 2+3 ; 5\n")
