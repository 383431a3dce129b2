from mobilego.utils import constants


def test_constants():
    assert constants.EPSILON == 1e-7
    assert constants.N_PLANES == 21
    assert constants.KOMI == 7.5
    assert constants.SCHEDULE[0] == (0, 0.005)
