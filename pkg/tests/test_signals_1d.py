import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stpconv.conv_engine import (
    Conv1DConfig,
    FiniteSignal,
    Variant,
    discrete_conv1d,
    domain_conv1d,
    domain_conv1d_reflected,
    l1_norm,
    stp_conv1d,
)
from stpconv.errors import ConfigError, InvalidValueError, ShapeError
from stpconv.xdim_algebra import XVector, stp_inner
from tests.strategies import signals

KERNEL_VEC = XVector([1, 0.6, 0.4, 1.5])


def sig(mapping: dict) -> FiniteSignal:
    return FiniteSignal.from_mapping(mapping)


def assert_signal_close(a: FiniteSignal, b: FiniteSignal, atol=1e-9):
    assert a.support == b.support
    np.testing.assert_allclose(a.values, b.values, rtol=0, atol=atol)


# --- FiniteSignal ---

def test_signal_validation():
    with pytest.raises(ShapeError):
        FiniteSignal((), ())
    with pytest.raises(ShapeError):
        FiniteSignal((1, 0), (1.0, 2.0))
    with pytest.raises(InvalidValueError):
        FiniteSignal((0,), (float("inf"),))


def test_signal_series_and_restriction():
    f = sig({0: 1.0, 2: -1.0, 3: 2.0})
    assert f.to_series().loc[2] == -1.0
    assert f.restrict({0, 3}).as_dict() == {0: 1.0, 3: 2.0}
    with pytest.raises(ShapeError):
        f.restrict({7})


def test_l1_norm():
    assert l1_norm(sig({0: 1.0, 5: -2.5})) == 3.5


# --- discrete convolution variants ---

def test_unit_impulse_is_identity():
    f = sig({-1: 2.0, 0: 3.0, 4: -1.0})
    assert discrete_conv1d(f, sig({0: 1.0})) == f


def test_box_with_itself():
    box = sig({0: 1.0, 1: 1.0})
    assert discrete_conv1d(box, box).as_dict() == {0: 1.0, 1: 2.0, 2: 1.0}


def test_cross_correlation_example():
    out = discrete_conv1d(sig({0: 1.0, 1: 2.0}), sig({0: 1.0, 1: 3.0}), Variant.CROSS_CORRELATION)
    assert out.as_dict() == {-1: 3.0, 0: 7.0, 1: 2.0}


def direct_variant(f: FiniteSignal, k: FiniteSignal, variant: Variant) -> dict:
    """Evaluate the defining sum of each variant over a window covering the result."""
    fd, kd = f.as_dict(), k.as_dict()
    reach = max(abs(n) for n in k.support)
    lo, hi = min(f.support) - reach, max(f.support) + reach
    out = {}
    for n in range(lo, hi + 1):
        if variant is Variant.CONV:
            terms = [fd[t] * kd[n - t] for t in fd if n - t in kd]
        elif variant is Variant.FLIPPED:
            terms = [fd[n - t] * kd[t] for t in kd if n - t in fd]
        else:
            terms = [fd[n + t] * kd[t] for t in kd if n + t in fd]
        if terms:
            out[n] = sum(terms)
    return out


@settings(max_examples=300)
@given(signals(), signals(), st.sampled_from(list(Variant)))
def test_variants_match_their_defining_sums(f, k, variant):
    expected = direct_variant(f, k, variant)
    assert_signal_close(discrete_conv1d(f, k, variant), sig(expected))


@settings(max_examples=1000)
@given(signals(), signals())
def test_convolution_is_commutative(f, k):
    assert_signal_close(discrete_conv1d(f, k), discrete_conv1d(k, f))


@settings(max_examples=1000)
@given(signals(max_len=4), signals(max_len=4), signals(max_len=4))
def test_convolution_is_associative(f, g, h):
    lhs = discrete_conv1d(discrete_conv1d(f, g), h)
    rhs = discrete_conv1d(f, discrete_conv1d(g, h))
    assert_signal_close(lhs, rhs, atol=1e-8)


@settings(max_examples=1000)
@given(signals(), signals())
def test_flipped_form_equals_convolution(f, k):
    assert_signal_close(discrete_conv1d(f, k, "flipped"), discrete_conv1d(f, k))


@settings(max_examples=1000)
@given(signals(), signals())
def test_cross_correlation_is_convolution_with_reversed_kernel(f, k):
    reversed_k = sig({-n: v for n, v in k.as_dict().items()})
    assert_signal_close(discrete_conv1d(f, k, Variant.CROSS_CORRELATION), discrete_conv1d(f, reversed_k))


# --- domain-based convolution ---

def test_domain_singleton():
    w = sig({0: 0.5, 2: -1.0})
    assert domain_conv1d(sig({0: 3.0}), w).as_dict() == {0: 1.5, 2: -3.0}


def test_domain_against_double_loop(rng):
    f = sig(dict(zip([0, 2, 3], rng.normal(size=3))))
    w = sig(dict(zip([-1, 0, 1, 4], rng.normal(size=4))))
    expected = {}
    for n in range(-5, 10):
        terms = [f.as_dict()[tau] * w.as_dict()[n - tau] for tau in (0, 2, 3) if n - tau in w.as_dict()]
        if terms:
            expected[n] = sum(terms)
    out = domain_conv1d(f, w)
    assert out.support == tuple(sorted(expected))
    np.testing.assert_allclose(out.values, [expected[n] for n in out.support])


def test_domain_restriction_argument():
    f = sig({0: 1.0, 1: 2.0, 2: 3.0})
    w = sig({0: 1.0})
    assert domain_conv1d(f, w, domain={0, 2}).as_dict() == {0: 1.0, 2: 3.0}


@settings(max_examples=1000)
@given(signals(), signals())
def test_reflected_domain_identity(f, w):
    assert_signal_close(domain_conv1d(f, w), domain_conv1d_reflected(f, w))


@settings(max_examples=1000)
@given(signals(), signals())
def test_young_inequality(f, w):
    assert l1_norm(domain_conv1d(f, w)) <= l1_norm(f) * l1_norm(w) + 1e-9


# --- STP convolution of masked sequences ---

def test_single_sample_against_kernel():
    out = stp_conv1d([1.0], KERNEL_VEC, Conv1DConfig(window=1))
    assert out.tolist() == [pytest.approx(0.875)]


def test_fully_defined_window_is_dot_over_length(rng):
    f = rng.normal(size=7)
    k = rng.normal(size=3)
    out = stp_conv1d(f, XVector(k), Conv1DConfig(window=3, stride=2))
    expected = [f[i:i + 3] @ k / 3 for i in (0, 2, 4)]
    np.testing.assert_allclose(np.ma.getdata(out), expected)


def test_masked_sample_is_compressed_away():
    k = XVector([1, 2, 3])
    with_gap = stp_conv1d([1.0, None, 2.0], k, Conv1DConfig(window=3))
    compressed = stp_conv1d([1.0, 2.0], k, Conv1DConfig(window=2))
    assert with_gap[0] == pytest.approx(compressed[0])


def test_padding_and_empty_windows():
    f = np.ma.MaskedArray([1.0, 5.0, 2.0], mask=[False, True, False])
    out = stp_conv1d(f, [2.0], Conv1DConfig(window=1, pad=1))
    assert np.ma.getmaskarray(out).tolist() == [True, False, True, False, True]
    assert np.ma.getdata(out)[1] == 2.0


def test_stride_mismatch():
    with pytest.raises(ShapeError):
        stp_conv1d([1.0, 2.0, 3.0, 4.0], [1.0, 1.0], Conv1DConfig(window=2, stride=3))


@pytest.mark.parametrize("kwargs", [dict(window=0), dict(window=2, stride=0), dict(window=2, pad=-1)])
def test_conv1d_config_validation(kwargs):
    with pytest.raises(ConfigError):
        Conv1DConfig(**kwargs)


@settings(max_examples=200)
@given(st.lists(st.one_of(st.none(), st.floats(-10, 10)), min_size=1, max_size=8),
       st.lists(st.floats(-10, 10), min_size=1, max_size=4))
def test_whole_signal_window_equals_available_inner_product(values, kernel):
    out = stp_conv1d(values, kernel, Conv1DConfig(window=len(values)))
    available = [v for v in values if v is not None]
    if not available:
        assert np.ma.getmaskarray(out).all()
    else:
        assert out[0] == pytest.approx(stp_inner(XVector(available), XVector(kernel)), abs=1e-9)
