import pytest

from mbk.bodies import CantorBumpSpec, disk, lp_ball, make_cantor_bump, regular_polygon


@pytest.fixture(scope="session")
def zoo():
    return {
        "disk": disk(),
        "l4": lp_ball(4),
        "square": lp_ball(float("inf")),
        "hexagon": regular_polygon(6),
    }


@pytest.fixture(scope="session")
def cantor_body():
    return make_cantor_bump(CantorBumpSpec(6, 0.01))
