"""Model definitions, closed-form profiles, ladder sequences, batch parity."""

import math

import numpy as np
import pytest

from regenext.core import make_stream, simulate_cycle
from regenext.models import (
    ConstMRule,
    ConstantStep,
    GeometricJump,
    IidBlock,
    Lindley,
    ParetoStep,
    ParetoTail,
    PrescribedBeta,
    ReflectedWalk,
    build_vsequence,
    closed_form_profile,
    geometric_jump_profile,
    iid_block_beta,
    iid_block_model,
    iid_block_profile,
    model_from_dict,
    model_to_dict,
    path_top_q,
    prescribed_beta_model,
    reflected_walk_profile,
    sample_cycle_batch,
)

ALL_MODELS = [
    GeometricJump(p=0.3),
    ReflectedWalk(p=0.3),
    Lindley(step=ParetoStep(alpha=1.5, shift=-4.0)),
    prescribed_beta_model((0.5, 0.3, 0.2))[0],
    iid_block_model([[1.0], [0.3, 0.7], [0.2, 0.3, 0.5]]),
]


# --- validation ------------------------------------------------------------

def test_parameter_validation():
    with pytest.raises(ValueError):
        GeometricJump(p=0.0)
    with pytest.raises(ValueError):
        ReflectedWalk(p=0.5)  # needs strict negative drift
    with pytest.raises(ValueError):
        Lindley(step=ConstantStep(0.5))  # nonnegative mean
    with pytest.raises(ValueError):
        prescribed_beta_model((0.5, 0.3))  # mass != 1
    with pytest.raises(ValueError):
        iid_block_model([[0.3, null] for null in (0.3,)])  # rows must sum to 1


# --- closed-form profiles --------------------------------------------------

def test_geometric_jump_profile_values():
    prof = geometric_jump_profile(0.3)
    assert prof.mu == pytest.approx(1 / 0.3)
    # G(x) = (1 - 0.7^(floor(x)+1))^0.3 for x > 0
    assert prof.G(2.5) == pytest.approx((1 - 0.7**3) ** 0.3)
    assert prof.G(-1.0) == 0.0
    # memoryless clusters: beta_i = p (1-p)^(i-1) at every threshold
    np.testing.assert_allclose(
        prof.beta_limit_vector(3), [0.3, 0.3 * 0.7, 0.3 * 0.7**2]
    )
    np.testing.assert_allclose(
        prof.beta_at_vector(6.0, 3), prof.beta_limit_vector(3)
    )


def test_reflected_walk_profile_values():
    p, q = 0.3, 0.7
    prof = reflected_walk_profile(p)
    assert prof.mu == pytest.approx(q / (q - p))
    assert prof.beta_limit_vector(1)[0] == pytest.approx(q - p)
    # i >= 2 limits are not available in closed form
    assert math.isnan(prof.beta_limit_vector(2)[1])
    # beta_1(x) -> q - p from above as x grows
    b1 = [prof.beta_at_vector(float(x), 1)[0] for x in (2, 5, 10, 20)]
    assert all(v >= q - p for v in b1)
    assert b1[-1] == pytest.approx(q - p, abs=1e-3)
    # G normalizes P(zeta <= x) by mu via the logarithm
    rho = q / p
    a = 7
    czeta = (q + p * (rho ** (a + 1) - rho) / (rho ** (a + 1) - 1))
    assert prof.G(float(a) + 0.4) == pytest.approx(czeta ** (1 - p / q))


def test_lindley_profile_is_estimated():
    model = Lindley(step=ParetoStep(alpha=1.5, shift=-4.0))
    assert closed_form_profile(model) is None
    model_det = Lindley(step=ConstantStep(-1.0))
    prof = closed_form_profile(model_det)
    assert prof.mu == 1.0 and prof.G(0.0) == 1.0


# --- ladder sequences ------------------------------------------------------

def test_vsequence_constant_rule():
    vseq = build_vsequence(ConstMRule(2), i0=2, upper=10.0)
    np.testing.assert_array_equal(vseq.v[:6], [1, 3, 5, 7, 9, 11])
    assert np.all(vseq.m == 2)


def test_vsequence_default_rule_invariants():
    _, prof, vseq = prescribed_beta_model((0.5, 0.3, 0.2))
    v, m = vseq.v, vseq.m
    assert v[0] == 1
    np.testing.assert_array_equal(v[1:], v[:-1] + m[:-1])
    assert np.all(m >= vseq.i0)
    assert np.all(np.diff(m) >= 0)
    # m_v = o(v): the ratio shrinks along the sequence
    ratio = m / v
    assert ratio[-1] < ratio[0] and ratio[-1] < 0.2


def test_prescribed_beta_exact_profile():
    beta = (0.5, 0.3, 0.2)
    model, prof, vseq = prescribed_beta_model(beta)
    np.testing.assert_allclose(prof.beta_limit_vector(3), beta, atol=1e-12)
    # just below a ladder point the cycle-max tail equals the reference tail
    F = ParetoTail(2.0)
    for n in (3, 6, 10):
        x = vseq.v[n] - 0.5
        sf = 1 - prof.G(x) ** prof.mu if prof.G(x) > 0 else 1.0
        assert sf == pytest.approx(F.sf(float(vseq.v[n])), rel=1e-9)


# --- iid blocks ------------------------------------------------------------

def test_iid_block_beta_single_row_identity():
    # one-point cycles: every cycle is a single draw, beta = (1, 0, ...)
    model = iid_block_model([[1.0]])
    prof = iid_block_profile(model)
    assert prof.mu == pytest.approx(1.0)
    np.testing.assert_allclose(prof.beta_at_vector(3.0, 2), [1.0, 0.0])
    # G(m) = P(V <= m) = 1 - 2^-(m+1) ... in the model's dyadic state space
    assert prof.G(2.0) == pytest.approx(1 - 2.0 ** -2)


def test_iid_block_beta_series():
    # table rows reused beyond the last: row (0.2, 0.3, 0.5) for all m >= 3
    law = [[1.0], [0.3, 0.7], [0.2, 0.3, 0.5]]
    model = iid_block_model(law)
    for m in (0, 1, 3):
        b = [iid_block_beta(model.cluster_law, m, i) for i in (1, 2, 3)]
        assert sum(b) == pytest.approx(1.0)
        assert all(v >= 0 for v in b)
    # at m=2 only rows v >= 3 contribute, all with the last law row
    got = [iid_block_beta(model.cluster_law, 2, i) for i in (1, 2, 3)]
    np.testing.assert_allclose(got, law[2], atol=1e-12)


# --- serialization ---------------------------------------------------------

@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_model_dict_round_trip(model):
    d = model_to_dict(model)
    back = model_from_dict(d)
    assert model_to_dict(back) == d
    # round-tripped model generates the identical cycle stream
    a = sample_cycle_batch(model, make_stream(5, 0), 200, 3)
    b = sample_cycle_batch(back, make_stream(5, 0), 200, 3)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


# --- scalar / batch kernel parity -------------------------------------------

@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_batch_kernel_matches_scalar_driver(model):
    """The jitted batch kernels consume the stream draw-for-draw like the
    pure-Python iterator, so both paths give identical cycles."""
    r, n_cyc = 4, 500
    lengths, maxima = sample_cycle_batch(model, make_stream(17, 0), n_cyc, r)
    rng = make_stream(17, 0)
    for i in range(n_cyc):
        rec = simulate_cycle(model, r, rng)
        assert rec.length == lengths[i]
        np.testing.assert_array_equal(rec.maxima_array(), maxima[i])


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: type(m).__name__)
def test_path_topq_consistent_with_cycles(model):
    """Top-q over a fixed horizon equals the top-q assembled from the cycle
    stream truncated at n steps, state by state."""
    n, q = 400, 3
    got = path_top_q(model, make_stream(23, 0), n, q)
    rng = make_stream(23, 0)
    states = []
    while len(states) < n:
        states.extend(model.cycle_steps(rng))
    states = [float(s) for s in states[:n]]
    want = sorted(states, reverse=True)[:q]
    np.testing.assert_array_equal(got, np.asarray(want))
