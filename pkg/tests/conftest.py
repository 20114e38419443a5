import mpmath
import pytest

from henonskew.base import BaseDynamics, BaseSpace, BaseSystem, point_base
from henonskew.expr import CoeffMap
from henonskew.family import HenonFactor, HenonFamily, quadratic_family
from henonskew.filtration import compute_radius


@pytest.fixture(scope="session")
def quad_fam():
    """p(y) = y^2, a = 0.3: the standard single quadratic family."""
    return quadratic_family(a=0.3)


@pytest.fixture(scope="session")
def single_base():
    return point_base(0.0)


@pytest.fixture(scope="session")
def quad_flt(quad_fam, single_base):
    return compute_radius(quad_fam, single_base.space, margin=1.0)


@pytest.fixture(scope="session")
def box_fam():
    """p(y) = y^2 + c(lam), c in [-0.1, 0.1] via c = lam, a = 0.2."""
    return HenonFamily(
        (HenonFactor(2, (CoeffMap.constant(0.0), CoeffMap.parse("u")), CoeffMap.constant(0.2)),)
    )


@pytest.fixture(scope="session")
def box_base():
    return BaseSystem(BaseSpace("box", bounds=((-0.1, 0.1),)), BaseDynamics("identity"))


@pytest.fixture(scope="session")
def two_letter_base():
    """M = {-0.1, +0.1} uniform; family uses c(lam) = lam."""
    return BaseSystem(BaseSpace("finite", points=(-0.1 + 0j, 0.1 + 0j)), BaseDynamics("shift"))


def mp_orbit_green(factor_data, lam_of_step, z, depth, degree, inverse=False, dps=40):
    """Arbitrary-precision Green oracle: d^-n log+ ||orbit point||.

    factor_data(lam) yields [(deg, [c_(d-1)..c_0], a)] per factor; mpmath
    mpf exponents are unbounded so d^n coordinate growth is exact.
    """
    with mpmath.workdps(dps):
        x, y = mpmath.mpc(z[0]), mpmath.mpc(z[1])
        for n in range(depth):
            lam = lam_of_step(n)
            facs = factor_data(lam)
            if inverse:
                for deg, coeffs, a in reversed(facs):
                    p = mpmath.mpc(1)
                    for c in coeffs:
                        p = p * x + mpmath.mpc(c)
                    x, y = (p - y) / mpmath.mpc(a), x
            else:
                for deg, coeffs, a in facs:
                    p = mpmath.mpc(1)
                    for c in coeffs:
                        p = p * y + mpmath.mpc(c)
                    x, y = y, p - mpmath.mpc(a) * x
        norm = mpmath.sqrt(abs(x) ** 2 + abs(y) ** 2)
        val = mpmath.log(norm) if norm > 1 else mpmath.mpf(0)
        return float(val / mpmath.mpf(degree) ** depth)


def quad_factor_data(a=0.3, c=0.0):
    def data(lam):
        cc = c(lam) if callable(c) else c
        return [(2, [0.0, cc], a)]

    return data
