import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stpconv.errors import ConfigError, DimensionOverflowError, InvalidValueError, ShapeError
from stpconv.xdim_algebra import (
    EquivClass,
    XVector,
    canonicalize,
    class_add,
    class_dist,
    class_inner,
    equivalent,
    lcm_dim,
    overlap_weights,
    overlaps,
    scale,
    stp_inner,
    stretch,
    vadd,
    vsub,
    xdist,
    xnorm,
)
from tests.strategies import xvectors

KERNEL_VEC = XVector([1, 0.6, 0.4, 1.5])


def kron_inner(x: XVector, y: XVector) -> float:
    """Literal evaluation through the lcm-dimensional expansions."""
    t = math.lcm(x.dim, y.dim)
    xe = np.kron(x.entries, np.ones(t // x.dim))
    ye = np.kron(y.entries, np.ones(t // y.dim))
    return float(xe @ ye) / t


# --- XVector ---

def test_xvector_rejects_empty():
    with pytest.raises(ShapeError):
        XVector([])


def test_xvector_rejects_non_finite():
    with pytest.raises(InvalidValueError):
        XVector([1.0, float("nan")])


def test_xvector_is_read_only():
    x = XVector([1, 2])
    with pytest.raises(ValueError):
        x.entries[0] = 5


# --- inner product ---

def test_stp_inner_single_entry_against_kernel():
    assert stp_inner(XVector([1]), KERNEL_VEC) == pytest.approx(0.875, abs=1e-12)


def test_stp_inner_dims_three_and_four():
    assert stp_inner(XVector([-2, 1, 1]), KERNEL_VEC) == pytest.approx(-0.025, abs=1e-12)


def test_stp_inner_equal_dims_is_scaled_dot():
    x, y = XVector([1, 2, 3]), XVector([4, -1, 2])
    assert stp_inner(x, y) == pytest.approx((4 - 2 + 6) / 3)


def test_stp_inner_matches_kronecker_expansion_on_random_pairs(rng):
    for _ in range(10_000):
        m, n = rng.integers(1, 13, size=2)
        x = XVector(rng.uniform(-5, 5, size=m))
        y = XVector(rng.uniform(-5, 5, size=n))
        assert abs(stp_inner(x, y) - kron_inner(x, y)) <= 1e-12


def test_overlap_lengths_cover_lcm():
    pieces = list(overlaps(4, 6))
    assert sum(length for _, _, length in pieces) == 12
    assert pieces[0] == (0, 0, 2)
    assert len(pieces) == 4 + 6 - math.gcd(4, 6)


def test_overlap_weights_reproduce_inner_product():
    x, y = XVector([1, -2, 3]), XVector([0.5, 2, -1, 4, 1])
    w = overlap_weights(3, 5)
    assert w.sum() == pytest.approx(1.0)
    assert x.entries @ w @ y.entries == pytest.approx(stp_inner(x, y), abs=1e-12)


def test_lcm_overflow_is_reported():
    with pytest.raises(DimensionOverflowError):
        lcm_dim(2**31 - 1, 2**31)


# --- addition, norm, distance ---

def test_vadd_expands_to_lcm():
    assert vadd(XVector([1, 2]), XVector([1, 2, 3])) == XVector([2, 2, 3, 4, 5, 5])


def test_vsub_of_equivalent_vectors_is_zero():
    assert np.all(vsub(XVector([1, 2]), XVector([1, 1, 2, 2])).entries == 0)


def test_xnorm_of_equal_dim_vector():
    assert xnorm(XVector([3, 4])) == pytest.approx(math.sqrt(25 / 2))


def test_stretch_rejects_zero_factor():
    with pytest.raises(ConfigError):
        stretch(XVector([1]), 0)


def test_scale():
    assert scale(XVector([1, -2]), 3) == XVector([3, -6])


# --- equivalence classes ---

def test_equivalent_stretched_vectors():
    assert equivalent(XVector([1, 2]), XVector([1, 1, 2, 2]))
    assert not equivalent(XVector([1, 2]), XVector([1, 2, 1, 2]))


def test_canonicalize_finds_shortest_representative():
    assert canonicalize(XVector([1, 1, 2, 2])).canonical == XVector([1, 2])
    assert canonicalize(XVector([1, 2, 1, 2])).canonical == XVector([1, 2, 1, 2])
    assert canonicalize(XVector([5, 5, 5])).canonical == XVector([5])


def test_equiv_class_representative():
    cls = EquivClass(XVector([1, 2]))
    assert cls.representative(3) == XVector([1, 1, 1, 2, 2, 2])


def test_class_operations_use_canonical_forms():
    a = canonicalize(XVector([1, 1, 2, 2]))
    b = canonicalize(XVector([3]))
    assert class_add(a, b).canonical == XVector([4, 5])
    assert class_inner(a, b) == pytest.approx(4.5)
    assert class_dist(a, a) == 0.0


# --- property suites ---

@settings(max_examples=1000)
@given(xvectors(), xvectors())
def test_cauchy_schwarz(x, y):
    assert abs(stp_inner(x, y)) <= xnorm(x) * xnorm(y) + 1e-9


@settings(max_examples=1000)
@given(xvectors(), xvectors(), xvectors())
def test_distance_is_a_pseudo_metric(x, y, z):
    assert xdist(x, y) >= 0
    assert xdist(x, y) == pytest.approx(xdist(y, x), abs=1e-12)
    assert xdist(x, z) <= xdist(x, y) + xdist(y, z) + 1e-9


@settings(max_examples=1000)
@given(xvectors(max_dim=6), xvectors(max_dim=6))
def test_distance_equals_norm_of_difference(x, y):
    assert xdist(x, y) == pytest.approx(xnorm(vsub(x, y)), abs=1e-9)


@settings(max_examples=1000)
@given(xvectors(), xvectors(), st.integers(1, 4))
def test_inner_product_is_representative_independent(x, y, k):
    assert stp_inner(stretch(x, k), y) == pytest.approx(stp_inner(x, y), abs=1e-9)
    assert xdist(x, stretch(x, k)) == 0.0
    assert equivalent(x, stretch(x, k), atol=0.0)


@settings(max_examples=1000)
@given(xvectors(max_dim=6), xvectors(max_dim=6), xvectors(max_dim=6),
       st.floats(-3, 3, allow_nan=False))
def test_inner_product_is_bilinear(x, y, z, alpha):
    lhs = stp_inner(vadd(scale(x, alpha), y), z)
    rhs = alpha * stp_inner(x, z) + stp_inner(y, z)
    assert lhs == pytest.approx(rhs, abs=1e-8)


@settings(max_examples=1000)
@given(xvectors(max_dim=8), st.integers(1, 4))
def test_canonical_form_is_shared_by_representatives(x, k):
    assert canonicalize(stretch(x, k)) == canonicalize(x)
    assert x.dim % canonicalize(x).canonical.dim == 0


@settings(max_examples=1000)
@given(xvectors(), xvectors())
def test_inner_product_is_symmetric(x, y):
    assert stp_inner(x, y) == pytest.approx(stp_inner(y, x), abs=1e-9)


@settings(max_examples=1000)
@given(xvectors(max_dim=8), xvectors(max_dim=8), st.integers(1, 4), st.integers(1, 4))
def test_inner_product_ignores_stretching_both_operands(x, y, k, j):
    assert stp_inner(stretch(x, k), stretch(y, j)) == pytest.approx(stp_inner(x, y), abs=1e-9)


@settings(max_examples=1000)
@given(xvectors(max_dim=8), xvectors(max_dim=8), st.integers(1, 4))
def test_addition_is_well_defined_on_classes(x, y, k):
    assert equivalent(vadd(stretch(x, k), y), vadd(x, y), atol=1e-9)


@settings(max_examples=1000)
@given(xvectors())
def test_canonicalize_is_idempotent(x):
    cls = canonicalize(x)
    assert canonicalize(cls.canonical) == cls


@settings(max_examples=1000)
@given(xvectors(max_dim=6, elements=st.sampled_from([0.0, 1.0, 2.0])),
       xvectors(max_dim=6, elements=st.sampled_from([0.0, 1.0, 2.0])))
def test_zero_distance_iff_equivalent(x, y):
    # entries in {0, 1, 2}: every squared difference is exact
    assert (xdist(x, y) == 0.0) == equivalent(x, y, atol=0.0)


def test_stretch_examples():
    assert stretch(XVector([1, 2]), 3) == XVector([1, 1, 1, 2, 2, 2])
    assert stretch(XVector([-2, 1, 1]), 4) == XVector([-2] * 4 + [1] * 8)


def test_distance_and_norm_examples():
    assert xdist(XVector([1, 0]), XVector([0, 1])) == pytest.approx(1.0)
    assert xnorm(XVector([1, 2])) == pytest.approx(math.sqrt(2.5))


def test_vadd_of_dims_two_and_three():
    assert vadd(XVector([1, 2]), XVector([1, 1, 1])) == XVector([2, 2, 2, 3, 3, 3])
