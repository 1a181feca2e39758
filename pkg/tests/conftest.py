from fractions import Fraction

import pytest
from hypothesis import strategies as st

# Non-integer rationals keep every Pochhammer in the hyperfunctions pole-free.
non_integer_rationals = st.builds(
    Fraction, st.integers(-9, 9), st.sampled_from([2, 3, 5, 7])
).filter(lambda q: q.denominator != 1)


@pytest.fixture
def q():
    return Fraction
