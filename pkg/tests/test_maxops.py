import numpy as np
import pytest

from wglab.errors import InputError, UndefinedMeasureError
from wglab.maxops import (
    GridFunction,
    OperatorReport,
    convolve,
    delta_scaling_probe,
    lp_norm,
    maximal,
)
from wglab.numtheory import sieve_primes
from wglab.surface import (
    ProblemInstance,
    enumerate_prime_points,
    gamma_member_mask,
    rep_count_array,
)


@pytest.fixture(scope="module")
def table():
    return sieve_primes(400)


@pytest.fixture(scope="module")
def measure77(table):
    return enumerate_prime_points(ProblemInstance(2, 5, 77), table)


def test_grid_function_validation():
    with pytest.raises(InputError):
        GridFunction(K=2, values=np.zeros((4, 4)))
    g = GridFunction.delta(3, 2)
    assert g.at((0, 0, 0)) == 1.0
    assert lp_norm(g, 1) == 1.0


def test_convolve_delta_reproduces_measure(measure77):
    f = GridFunction.delta(5, 5)
    out = convolve(f, measure77)
    for row, w in zip(measure77.representations, measure77.weights):
        assert out.at(row) == pytest.approx(w / measure77.R, rel=1e-12)
    assert lp_norm(out, 1) == pytest.approx(1.0, rel=1e-12)


def test_convolve_constant_total_mass(measure77):
    f = GridFunction.constant(5, 8)
    out = convolve(f, measure77)
    # translates fit inside the box at points x with x - p still in the box
    assert out.at((0, 0, 0, 0, 0)) == pytest.approx(1.0, rel=1e-12)
    assert out.at((1, -1, 0, 2, -2)) == pytest.approx(1.0, rel=1e-12)


def test_convolve_paths_agree(table, measure77):
    rng = np.random.default_rng(14)
    for n, lam in [(5, 77), (3, 83), (2, 13)]:
        measure = enumerate_prime_points(ProblemInstance(2, n, lam), table)
        if measure.r == 0:
            continue
        f = GridFunction(
            K=4,
            values=rng.standard_normal((9,) * n) + 1j * rng.standard_normal((9,) * n),
        )
        a = convolve(f, measure, method="direct")
        b = convolve(f, measure, method="fft")
        assert np.abs(a.values - b.values).max() < 1e-10


def test_convolve_linearity(measure77):
    rng = np.random.default_rng(15)
    f = GridFunction(K=3, values=rng.standard_normal((7,) * 5) + 0j)
    g = GridFunction(K=3, values=rng.standard_normal((7,) * 5) + 0j)
    a, b = 0.375, -2.25  # exactly representable scalars
    combined = GridFunction(K=3, values=a * f.values + b * g.values)
    lhs = convolve(combined, measure77).values
    rhs = a * convolve(f, measure77).values + b * convolve(g, measure77).values
    assert np.abs(lhs - rhs).max() < 1e-12


def test_convolve_requires_mass(table):
    empty = enumerate_prime_points(ProblemInstance(2, 5, 29), table)
    with pytest.raises(UndefinedMeasureError):
        convolve(GridFunction.delta(5, 2), empty)


def test_convolve_unnormalized(measure77):
    f = GridFunction.delta(5, 5)
    raw = convolve(f, measure77, normalized=False)
    assert raw.at((3, 3, 3, 5, 5)) == pytest.approx(measure77.weights[0], rel=1e-12)


def test_sup_norm_contraction(measure77):
    rng = np.random.default_rng(16)
    f = GridFunction(K=4, values=rng.standard_normal((9,) * 5) + 0j)
    out = convolve(f, measure77)
    assert lp_norm(out, np.inf) <= lp_norm(f, np.inf) + 1e-12


def test_maximal_single_and_monotone(table):
    lams = [77, 125, 149]
    measures = [
        enumerate_prime_points(ProblemInstance(2, 5, lam), table) for lam in lams
    ]
    measures = [m for m in measures if m.r > 0]
    f = GridFunction.constant(5, 4, 0.7)
    single = maximal(f, measures[:1])
    assert np.allclose(
        single.values.real, np.abs(convolve(f, measures[0]).values), atol=1e-14
    )
    small = maximal(f, measures[:2])
    full = maximal(f, measures)
    assert np.all(full.values.real >= small.values.real - 1e-14)
    assert np.all(full.values.real >= np.abs(convolve(f, measures[-1]).values) - 1e-14)


def test_maximal_validation(measure77, table):
    with pytest.raises(InputError):
        maximal(GridFunction.delta(5, 2), [])
    other = enumerate_prime_points(ProblemInstance(2, 3, 83), table)
    with pytest.raises(InputError):
        maximal(GridFunction.delta(5, 2), [measure77, other])


def test_lp_norm_examples():
    delta = GridFunction.delta(3, 2)
    for p in (1, 1.5, 2, 7, np.inf):
        assert lp_norm(delta, p) == 1.0
    g = GridFunction.zeros(2, 2)
    g.values[0, 0] = g.values[1, 1] = g.values[2, 2] = g.values[3, 3] = 1.0
    assert lp_norm(g, 2) == pytest.approx(2.0)
    assert lp_norm(GridFunction(K=2, values=3.5 * g.values), 2) == pytest.approx(7.0)
    with pytest.raises(InputError):
        lp_norm(g, 0.5)


def test_delta_probe_against_enumeration(table):
    """The convolution route equals the per-lambda definition on small ranges."""
    k, n, p, lam_max = 2, 3, 1.2, 600
    report = delta_scaling_probe(k, n, p, [lam_max], table)
    counts = rep_count_array(k, n, lam_max, table)
    total = 0.0
    for lam in range(1, lam_max + 1):
        if counts[lam] == 0 or not gamma_member_mask(k, n, np.array([lam]))[0]:
            continue
        m = enumerate_prime_points(ProblemInstance(k, n, lam), table)
        total += ((m.weights / m.R) ** p).sum()
    assert report.norms[0] == pytest.approx(total ** (1 / p), rel=1e-9)


def test_delta_probe_monotone_norms(table):
    report = delta_scaling_probe(2, 5, 1.2, [512, 1024, 2048, 4096], table)
    norms = list(report.norms)
    assert norms == sorted(norms)
    assert report.slope is not None and report.slope >= 0


def test_delta_probe_sup_norm_bounded(table):
    report = delta_scaling_probe(2, 5, np.inf, [4096], table)
    assert 0 < report.norms[0] <= 1.0


def test_delta_probe_is_report(table):
    report = delta_scaling_probe(2, 5, 1.2, [1024, 2048], table)
    assert isinstance(report, OperatorReport)
    assert report.p == 1.2
    assert len(report.lam_values) == len(report.norms) == 2
