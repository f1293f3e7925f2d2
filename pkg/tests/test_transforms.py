import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from sqbias import (
    DiscreteDist,
    MixtureDist,
    PiecewiseDensity,
    PreconditionError,
    affine,
    convolve,
    double_size_bias,
    l1_distance,
    point_mass,
    rademacher,
    size_bias,
    square_bias,
    standardize,
    uniform,
    uniform_product_square_bias,
    zero_bias,
    zero_bias_decomposition,
)
from sqbias.distmodel import cdf_right, flatten, pushforward
from sqbias.rng import (
    SplitMix64,
    random_mean_zero,
    random_nonnegative,
    random_standardized,
    random_symmetric_standardized,
)
from sqbias.transforms import sum_law


def _sup_diff(a, b, lo, hi, n=1000):
    grid = np.linspace(lo, hi, n)
    return float(np.max(np.abs(flatten(a).cdf(grid) - flatten(b).cdf(grid))))


class TestSizeBias:
    def test_point_mass_fixed(self):
        assert size_bias(point_mass(2.5)) == point_mass(2.5)

    def test_two_atoms(self):
        out = size_bias(DiscreteDist((1.0, 2.0), (0.5, 0.5)))
        assert_allclose(out.probs, [1 / 3, 2 / 3], rtol=1e-15)

    def test_uniform_becomes_linear(self):
        out = size_bias(uniform(0, 1))
        assert isinstance(out, PiecewiseDensity)
        assert_allclose(out.coeffs, [(0.0, 2.0, 0.0)], atol=1e-15)

    def test_zero_atom_dropped(self):
        out = size_bias(DiscreteDist((0.0, 1.0, 3.0), (0.5, 0.25, 0.25)))
        assert out.atoms == (1.0, 3.0)

    @pytest.mark.parametrize("d", [rademacher(), point_mass(0.0), DiscreteDist((-0.1, 1.0), (0.5, 0.5))])
    def test_rejects(self, d):
        with pytest.raises(PreconditionError, match="size bias requires nonnegative nondegenerate input"):
            size_bias(d)


class TestSquareBias:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0, 0.1, 7.25])
    def test_rademacher_bitwise_fixed(self, sigma):
        d = rademacher(sigma)
        out = square_bias(d)
        assert out.atoms == d.atoms and out.probs == d.probs

    def test_two_point(self, two_point):
        out = square_bias(two_point)
        assert_allclose(out.atoms, [-1 / 3, 3], rtol=1e-15)
        assert_allclose(out.probs, [0.1, 0.9], rtol=1e-14)

    def test_zero_atom_dropped(self):
        assert square_bias(DiscreteDist((0.0, 2.0), (0.5, 0.5))) == point_mass(2.0)

    def test_uniform_becomes_quadratic(self):
        out = square_bias(uniform(-1, 1))
        assert_allclose(out.coeffs, [(0.0, 0.0, 1.5)], atol=1e-15)

    def test_rejects_zero_second_moment(self):
        with pytest.raises(PreconditionError):
            square_bias(point_mass(0.0))

    def test_scaling_equivariance(self):
        rng = SplitMix64(21)
        for _ in range(20):
            d = random_standardized(rng)
            for c in (-2.0, 0.5, 3.0):
                lhs = square_bias(affine(d, c))
                rhs = affine(square_bias(d), c)
                assert_allclose(lhs.atoms, rhs.atoms, rtol=1e-15)
                assert_allclose(lhs.probs, rhs.probs, rtol=1e-13)

    def test_squared_square_bias_is_size_bias_of_square(self):
        rng = SplitMix64(22)
        for _ in range(30):
            d = random_mean_zero(rng)
            lhs = pushforward(square_bias(d), lambda x: x * x)
            rhs = size_bias(pushforward(d, lambda x: x * x))
            assert_allclose(lhs.atoms, rhs.atoms, rtol=1e-15)
            assert_allclose(lhs.probs, rhs.probs, rtol=1e-13)


class TestDoubleSizeBias:
    def test_point_mass(self):
        assert double_size_bias(point_mass(3.0)) == point_mass(3.0)

    def test_two_atoms(self):
        out = double_size_bias(DiscreteDist((1.0, 2.0), (0.5, 0.5)))
        assert_allclose(out.probs, [0.2, 0.8], rtol=1e-14)

    def test_matches_square_bias_on_random_laws(self):
        rng = SplitMix64(23)
        for _ in range(50):
            d = random_nonnegative(rng)
            a, b = square_bias(d), size_bias(size_bias(d))
            assert a.atoms == b.atoms
            assert_allclose(a.probs, b.probs, atol=1e-12, rtol=0)

    def test_density_input(self):
        a, b = square_bias(uniform(0, 2)), double_size_bias(uniform(0, 2))
        assert l1_distance(a, b) <= 1e-14


class TestZeroBias:
    def test_rademacher_uniform(self, rad):
        out = zero_bias(rad)
        assert out.breakpoints == (-1.0, 1.0)
        assert out.coeffs == ((0.5, 0.0, 0.0),)

    def test_two_point(self, two_point):
        out = zero_bias(two_point)
        assert_allclose(out.breakpoints, [-1 / 3, 3], rtol=1e-15)
        assert_allclose(out.coeffs, [(0.3, 0, 0)], rtol=1e-14, atol=1e-15)

    def test_symmetric_three_point(self):
        d = standardize(DiscreteDist((-1.0, 0.0, 1.0), (0.375, 0.25, 0.375)))
        out = zero_bias(d)
        grid = np.linspace(0, 2, 201)
        f = flatten(out)
        assert_allclose(f.cdf(-grid) + f.cdf_right(grid), 1.0, atol=1e-15)

    def test_nonzero_mean(self):
        with pytest.raises(PreconditionError, match="zero bias requires mean zero"):
            zero_bias(DiscreteDist((-1.0, 2.0), (0.5, 0.5)))

    def test_small_residual_mean_is_absorbed(self):
        out = zero_bias(DiscreteDist((-1.0 + 1e-11, 1.0 + 1e-11), (0.5, 0.5)))
        assert l1_distance(out, uniform(-1, 1)) <= 1e-10

    def test_density_input(self):
        # zero bias of uniform on [-1, 1] has density 3(1 - x^2)/4
        out = zero_bias(uniform(-1, 1))
        assert_allclose(flatten(out).cdf(np.array([0.0, 0.5])), [0.5, 0.5 + 3 / 4 * (0.5 - 0.5**3 / 3)], atol=1e-15)

    def test_never_fixed_for_discrete(self):
        rng = SplitMix64(24)
        for _ in range(50):
            d = random_standardized(rng)
            assert l1_distance(d, zero_bias(d)) > 1e-3

    def test_symmetry_preserved(self):
        rng = SplitMix64(25)
        for _ in range(30):
            d = random_symmetric_standardized(rng)
            grid = np.linspace(0, 6, 301)
            for out in (zero_bias(d), square_bias(d)):
                f = flatten(out)
                assert_allclose(f.cdf(-grid) + f.cdf_right(grid), 1.0, atol=1e-14)


class TestUniformProduct:
    def test_rademacher(self, rad):
        out = uniform_product_square_bias(rad)
        assert l1_distance(out, uniform(-1, 1)) == 0.0

    def test_matches_zero_bias_for_symmetric(self):
        rng = SplitMix64(26)
        for _ in range(50):
            d = random_symmetric_standardized(rng)
            r = max(d.atoms)
            assert _sup_diff(uniform_product_square_bias(d), zero_bias(d), -r - 1, r + 1) <= 1e-12

    def test_requires_discrete(self):
        with pytest.raises(PreconditionError):
            uniform_product_square_bias(uniform(-1, 1))


class TestDecomposition:
    def test_single_summand(self, two_point):
        out = zero_bias_decomposition([two_point])
        assert _sup_diff(out, zero_bias(two_point), -1, 4) <= 1e-15

    def test_two_rademachers(self, rad):
        direct = zero_bias(convolve(rad, rad))
        mixed = zero_bias_decomposition([rad, rad])
        assert _sup_diff(direct, mixed, -3, 3) <= 1e-15

    def test_weights_follow_variances(self):
        out = zero_bias_decomposition([rademacher(1.0), rademacher(3**0.5)])
        assert isinstance(out, MixtureDist)
        assert_allclose([w for w, _ in out.components], [0.25, 0.75], rtol=1e-15)

    def test_random_summands(self):
        rng = SplitMix64(27)
        for _ in range(30):
            parts = [random_mean_zero(rng) for _ in range(rng.randint(2, 4))]
            span = sum(max(abs(a) for a in p.atoms) for p in parts) + 1
            assert _sup_diff(zero_bias(sum_law(parts)), zero_bias_decomposition(parts), -span, span) <= 1e-10

    def test_requires_discrete(self, rad):
        with pytest.raises(PreconditionError):
            zero_bias_decomposition([rad, uniform(-1, 1)])


def test_moment_identities(rad, two_point):
    for d in (rad, two_point, standardize(DiscreteDist((-2.0, 0.5, 4.0), (0.2, 0.5, 0.3)))):
        f = flatten(d)
        s2 = f.raw_moment(2)
        zb = flatten(zero_bias(d))
        for n in (1, 2, 3):
            assert s2 * zb.raw_moment(n) == pytest.approx(f.raw_moment(n + 2) / (n + 1), rel=1e-12, abs=1e-15)
        sq = flatten(square_bias(d))
        for r in (0.5, 1.0, 2.5):
            assert s2 * sq.abs_moment(r) == pytest.approx(f.abs_moment(r + 2), rel=1e-12)


def test_sum_law_matches_convolution(rad, two_point):
    s = sum_law([rad, two_point])
    c = convolve(rad, two_point)
    assert_array_equal(s.atoms, c.atoms)
    assert cdf_right(s, 10.0) == pytest.approx(1.0)
