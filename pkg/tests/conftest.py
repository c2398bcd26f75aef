"""Shared fixtures: reference parameter sets and the hand-computed case.

``PERSISTENT_PARAMS`` is a high-persistence, mildly cross-linked
parameterization used for recovery tests; ``REVERSAL_PARAMS`` has a
strong br-to-us cross structure so direction asymmetries are visible.
``HAND_*`` is a three-observation case whose filtered covariances and
log-likelihood were computed by an independent brute-force recursion and
frozen here; tests compare the production kernels against these numbers.
"""

import numpy as np
import pytest

from crossvol.bekk import BekkParams

PERSISTENT_PARAMS = BekkParams(
    mu=[-0.0004, -0.0004],
    c=[[0.0061, 0.0], [-0.0001, 0.0013]],
    a=[[0.1865, -0.0558], [0.0694, 0.2409]],
    b=[[0.9487, 0.0102], [-0.0041, 0.9677]],
)

REVERSAL_PARAMS = BekkParams(
    mu=[-0.0001, -0.0002],
    c=[[0.0027, 0.0], [0.0097, 0.0003]],
    a=[[0.1878, -0.4899], [-0.0269, 0.3664]],
    b=[[0.9683, 0.1213], [-0.0016, 0.4500]],
)

DIAGONAL_PARAMS = BekkParams(
    mu=[0.0, 0.0],
    c=[[0.0061, 0.0], [-0.0001, 0.0013]],
    a=[[0.1865, 0.0], [0.0, 0.2409]],
    b=[[0.9487, 0.0], [0.0, 0.9677]],
)

HAND_PARAMS = BekkParams(
    mu=[0.02, -0.01],
    c=[[0.3, 0.0], [-0.1, 0.2]],
    a=[[0.35, -0.06], [0.10, 0.30]],
    b=[[0.90, 0.05], [-0.04, 0.85]],
)
HAND_H0 = np.array([[1.0, 0.3], [0.3, 2.0]])
HAND_E = np.array([[0.5, -0.3], [-0.2, 0.4], [0.1, 0.0]])

# frozen output of the independent brute-force recursion on the hand case
HAND_H1 = np.array([[0.90092099999999997, 0.1598038], [0.1598038, 1.5364096399999998]])
HAND_H2 = np.array(
    [[0.81199439182400002, 0.075330616640000014], [0.075330616640000014, 1.1944420303999999]]
)
HAND_LOGLIK = -6.2343627730523572
HAND_UNCOND = np.array(
    [[1.3871405320743688, 0.014701628834799082], [0.014701628834799082, 0.31563699764564684]]
)
HAND_RHO = 0.93394969616038348


@pytest.fixture
def hand_case():
    return HAND_PARAMS, HAND_E.copy(), HAND_H0.copy()


def business_days(start: str, n: int) -> np.ndarray:
    first = np.busday_offset(start, 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward")
