from fractions import Fraction

import pytest

from carleman.sequences import SequenceSpec, WeightSequence


@pytest.fixture(scope="session")
def constant_spec():
    return SequenceSpec(family="constant")


@pytest.fixture(scope="session")
def gevrey1_spec():
    return SequenceSpec(family="gevrey", s=Fraction(1))


@pytest.fixture(scope="session")
def paper8_spec():
    return SequenceSpec(family="paper8")


@pytest.fixture(scope="session")
def constant_ws(constant_spec):
    return WeightSequence(constant_spec)


@pytest.fixture(scope="session")
def gevrey1_ws(gevrey1_spec):
    return WeightSequence(gevrey1_spec)


@pytest.fixture(scope="session")
def paper8_ws(paper8_spec):
    return WeightSequence(paper8_spec)
