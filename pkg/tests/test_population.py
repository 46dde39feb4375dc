"""Population parsing, moments, and summary parameters."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from estlab import (
    DegeneratePopulationError,
    FinitePopulation,
    InvalidMomentsError,
    InvalidSampleSizeError,
    MissingPopulationSizeError,
    PopulationParseError,
    bernoulli_kurtosis,
    compute_params,
    load_population,
    params_from_moments,
    variance_sample_mean,
)

FOUR_UNITS = FinitePopulation(y=np.array([1.0, 2.0, 3.0, 4.0]), phi=np.array([0, 0, 1, 1]))


class TestLoadPopulation:
    def test_parses_two_rows(self):
        pop = load_population(io.StringIO("y,phi\n1,0\n2,1"))
        assert pop.N == 2
        assert pop.y.tolist() == [1.0, 2.0]
        assert pop.phi.tolist() == [0, 1]

    def test_crlf_and_trailing_newline(self):
        pop = load_population(io.StringIO("y,phi\r\n1.5,0\r\n2.5,1\r\n"))
        assert pop.y.tolist() == [1.5, 2.5]

    def test_accepts_path(self, tmp_path):
        path = tmp_path / "pop.csv"
        path.write_text("y,phi\n1,0\n2,1\n", encoding="utf-8")
        assert load_population(path).N == 2

    def test_row_order_preserved(self):
        pop = load_population(io.StringIO("y,phi\n9,1\n1,0\n5,1"))
        assert pop.y.tolist() == [9.0, 1.0, 5.0]
        assert pop.phi.tolist() == [1, 0, 1]

    def test_non_binary_attribute_names_line(self):
        with pytest.raises(PopulationParseError, match="line 2"):
            load_population(io.StringIO("y,phi\n1,2\n2,1"))

    def test_too_few_units(self):
        with pytest.raises(PopulationParseError, match="at least 2"):
            load_population(io.StringIO("y,phi\n1,0"))

    def test_bad_header(self):
        with pytest.raises(PopulationParseError, match="header"):
            load_population(io.StringIO("a,b\n1,0\n2,1"))

    def test_wrong_field_count_names_line(self):
        with pytest.raises(PopulationParseError, match="line 3"):
            load_population(io.StringIO("y,phi\n1,0\n2,1,9"))

    def test_non_numeric_study_value(self):
        with pytest.raises(PopulationParseError, match="line 2"):
            load_population(io.StringIO("y,phi\nx,0\n2,1"))

    def test_empty_input(self):
        with pytest.raises(PopulationParseError):
            load_population(io.StringIO(""))


class TestFinitePopulation:
    def test_length_mismatch(self):
        with pytest.raises(PopulationParseError, match="mismatch"):
            FinitePopulation(y=np.array([1.0, 2.0]), phi=np.array([0, 1, 1]))

    def test_non_binary(self):
        with pytest.raises(PopulationParseError, match="0 or 1"):
            FinitePopulation(y=np.array([1.0, 2.0]), phi=np.array([0, 2]))

    def test_arrays_read_only(self):
        with pytest.raises(ValueError):
            FOUR_UNITS.y[0] = 99.0

    def test_attribute_count(self):
        assert FOUR_UNITS.attribute_count == 2


class TestComputeParams:
    def test_four_unit_hand_values(self):
        # Divisor-(N-1) formulas evaluated by hand:
        # deviations of y from 2.5 are (-1.5,-0.5,0.5,1.5), squares sum to 5
        # attribute deviations from 0.5 are (+-0.5), cross products sum to 2
        p = compute_params(FOUR_UNITS)
        assert p.Ybar == 2.5
        assert p.P == 0.5
        assert p.S_y2 == pytest.approx(5.0 / 3.0, rel=1e-15)
        assert p.S_phi2 == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert p.S_yphi == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert p.rho_pb == pytest.approx(2.0 / math.sqrt(5.0), rel=1e-15)
        assert p.beta2_phi == pytest.approx(1.0, rel=1e-15)
        assert p.N == 4

    def test_constant_y_rejected(self):
        pop = FinitePopulation(y=np.array([3.0, 3.0, 3.0]), phi=np.array([0, 1, 1]))
        with pytest.raises(DegeneratePopulationError, match="constant"):
            compute_params(pop)

    def test_constant_attribute_rejected(self):
        pop = FinitePopulation(y=np.array([1.0, 2.0, 3.0]), phi=np.array([1, 1, 1]))
        with pytest.raises(DegeneratePopulationError):
            compute_params(pop)

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=-100, max_value=100, allow_nan=False),
                st.integers(min_value=0, max_value=1),
            ),
            min_size=3,
            max_size=40,
        )
    )
    def test_permutation_invariant(self, units):
        y = np.array([u[0] for u in units])
        phi = np.array([u[1] for u in units])
        if phi.sum() in (0, len(phi)):
            return
        rng = np.random.default_rng(0)
        perm = rng.permutation(len(y))
        try:
            a = compute_params(FinitePopulation(y=y, phi=phi))
            b = compute_params(FinitePopulation(y=y[perm], phi=phi[perm]))
        except DegeneratePopulationError:
            return  # constant, zero-mean, or variance-underflow draws
        for field in ("Ybar", "P", "S_y2", "S_phi2", "S_yphi", "rho_pb", "C_y", "C_p", "beta2_phi"):
            assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12, abs=1e-12)

    @given(st.integers(min_value=1, max_value=29), st.integers(min_value=30, max_value=60))
    def test_binary_variance_identity(self, a, n):
        # S_phi2 * (N-1) must equal N*P*(1-P) for any binary vector.
        phi = np.array([1] * a + [0] * (n - a))
        y = np.arange(n, dtype=float)
        p = compute_params(FinitePopulation(y=y, phi=phi))
        assert p.S_phi2 * (n - 1) == pytest.approx(n * p.P * (1 - p.P), rel=1e-14)

    @given(st.integers(min_value=1, max_value=29), st.integers(min_value=30, max_value=60))
    def test_attribute_kurtosis_matches_moment_ratio(self, a, n):
        # mu4/mu2^2 with divisor-N central moments equals (1-3PQ)/(PQ).
        phi = np.array([1] * a + [0] * (n - a), dtype=float)
        p = a / n
        mu2 = np.mean((phi - p) ** 2)
        mu4 = np.mean((phi - p) ** 4)
        assert mu4 / mu2**2 == pytest.approx(bernoulli_kurtosis(p), rel=1e-12)


class TestParamsFromMoments:
    def test_reference_study_moments(self):
        p = params_from_moments(3.36, 0.1236, 0.766, 0.604, 2.19, 6.23181, 89)
        assert p.S_y2 == pytest.approx((0.604 * 3.36) ** 2, rel=1e-15)
        assert p.S_phi2 == pytest.approx((2.19 * 0.1236) ** 2, rel=1e-15)
        assert p.S_yphi == pytest.approx(0.766 * 0.604 * 3.36 * 2.19 * 0.1236, rel=1e-15)
        assert p.beta2_phi == 6.23181
        assert p.N == 89

    def test_beta2_defaults_to_closed_form(self):
        p = params_from_moments(3.36, 0.1236, 0.766, 0.604, 2.19)
        assert p.beta2_phi == pytest.approx((1 - 3 * 0.1236 * 0.8764) / (0.1236 * 0.8764), rel=1e-15)
        assert p.beta2_phi == pytest.approx(6.23181, abs=1e-3)
        assert p.N is None

    def test_zero_correlation_symmetric_attribute(self):
        p = params_from_moments(1.0, 0.5, 0.0, 1.0, 1.0)
        assert p.S_yphi == 0.0
        assert p.beta2_phi == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(Ybar=3.36, P=0.0, rho_pb=0.5, C_y=1.0, C_p=1.0),
            dict(Ybar=3.36, P=1.0, rho_pb=0.5, C_y=1.0, C_p=1.0),
            dict(Ybar=3.36, P=0.5, rho_pb=1.5, C_y=1.0, C_p=1.0),
            dict(Ybar=3.36, P=0.5, rho_pb=0.5, C_y=-1.0, C_p=1.0),
            dict(Ybar=3.36, P=0.5, rho_pb=0.5, C_y=1.0, C_p=0.0),
            dict(Ybar=-1.0, P=0.5, rho_pb=0.5, C_y=1.0, C_p=1.0),
        ],
    )
    def test_out_of_range_rejected(self, kwargs):
        with pytest.raises(InvalidMomentsError):
            params_from_moments(**kwargs)

    @given(
        st.integers(min_value=5, max_value=50),
        st.integers(min_value=1, max_value=4),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=60)
    def test_roundtrip_through_moments(self, n, a_frac, rnd):
        rng = np.random.default_rng(rnd.randrange(2**32))
        a = max(1, min(n - 1, int(n * a_frac / 5)))
        phi = np.array([1] * a + [0] * (n - a))
        y = rng.normal(10.0, 2.0, n)
        if np.all(y == y[0]):
            return
        original = compute_params(FinitePopulation(y=y, phi=phi))
        rebuilt = params_from_moments(
            original.Ybar,
            original.P,
            original.rho_pb,
            original.C_y,
            original.C_p,
            original.beta2_phi,
            original.N,
        )
        for field in ("Ybar", "P", "Q", "S_y2", "S_phi2", "S_yphi", "rho_pb", "C_y", "C_p", "beta2_phi"):
            assert getattr(rebuilt, field) == pytest.approx(getattr(original, field), rel=1e-12)


class TestVarianceSampleMean:
    def test_reference_value(self):
        p = params_from_moments(3.36, 0.1236, 0.766, 0.604, 2.19, 6.23181, 89)
        # ((1 - 23/89)/23) * S_y2 evaluated by hand
        assert variance_sample_mean(p, 23) == pytest.approx((1 - 23 / 89) / 23 * p.S_y2, rel=1e-15)
        assert variance_sample_mean(p, 23) == pytest.approx(0.1327940220310698, rel=1e-12)

    def test_census_is_zero(self):
        p = compute_params(FOUR_UNITS)
        assert variance_sample_mean(p, 4) == 0.0

    def test_oversized_sample_rejected(self):
        p = compute_params(FOUR_UNITS)
        with pytest.raises(InvalidSampleSizeError):
            variance_sample_mean(p, 5)

    def test_unknown_population_size_rejected(self):
        p = params_from_moments(3.36, 0.1236, 0.766, 0.604, 2.19)
        with pytest.raises(MissingPopulationSizeError):
            variance_sample_mean(p, 10)
