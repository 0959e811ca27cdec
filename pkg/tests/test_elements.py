"""Tests for sources, linear elements, gratings and the rhom source."""

import math

import numpy as np
import pytest

from quantum.elements import (
    GratingMap,
    PairSource,
    apply_grating,
    apply_linear,
    compose,
    invert_grating,
    is_unitary,
    make_beamsplitter,
    make_mmi,
    make_mzi,
    make_phase,
    make_unitary,
    mzi_matrix,
    mzi_theta_for_split,
    random_unitary,
    rhom_probabilities,
    rhom_source_output,
)
from quantum.fock import Channel, FockState, FockTerm, Mode, normalize
from utils.errors import DoubleRelabelError, NonUnitaryError, PathIdentityError

U_A = Mode('a', Channel.RAIL_UPPER)
L_A = Mode('a', Channel.RAIL_LOWER)
U_B = Mode('b', Channel.RAIL_UPPER)
L_B = Mode('b', Channel.RAIL_LOWER)


class TestPairSource:
    def test_idealized(self):
        source = PairSource.idealized('1', U_A, L_B, 2j)
        assert source.pumped.amplitude(((U_A, 1), (L_B, 1))) == 2j

    def test_degenerate(self):
        source = PairSource.idealized('1', U_A, U_A)
        assert source.emission.photon_numbers() == {2}

    def test_rejects_wrong_photon_number(self):
        emission = FockState.from_terms([FockTerm.create({U_A: 3})])
        with pytest.raises(PathIdentityError):
            PairSource('1', emission)


class TestBeamsplitter:
    def test_zero_reflectance_is_identity(self):
        assert np.allclose(make_beamsplitter(U_A, L_A, 0.0).matrix, np.eye(2))

    def test_balanced(self):
        assert np.allclose(np.abs(make_beamsplitter(U_A, L_A, 0.5).matrix), 1 / math.sqrt(2))

    def test_one_third(self):
        element = make_beamsplitter(U_A, L_A, 1 / 3)
        assert abs(abs(element.matrix[1, 0]) ** 2 - 1 / 3) < 1e-12

    @pytest.mark.parametrize('r', [-0.1, 1.5])
    def test_reflectance_out_of_range(self, r):
        with pytest.raises(PathIdentityError, match='Reflectance must be between 0 and 1'):
            make_beamsplitter(U_A, L_A, r)

    def test_same_mode(self):
        with pytest.raises(PathIdentityError):
            make_beamsplitter(U_A, U_A, 0.5)

    def test_mmi_is_balanced_coupler(self):
        assert np.allclose(make_mmi(U_A, L_A).matrix, make_beamsplitter(U_A, L_A, 0.5).matrix)

    def test_matrix_is_read_only(self):
        element = make_mmi(U_A, L_A)
        with pytest.raises(ValueError):
            element.matrix[0, 0] = 0


class TestMZI:
    def test_bar_state(self):
        """theta = 0 leaves both modes in place, with a sign on the first."""
        assert np.allclose(mzi_matrix(0.0), [[-1, 0], [0, 1]])

    @pytest.mark.parametrize('split', [0.0, 1 / 3, 0.5, 1.0])
    def test_cross_probability(self, split):
        element = make_mzi(U_A, L_A, mzi_theta_for_split(split))
        assert abs(abs(element.matrix[1, 0]) ** 2 - split) < 1e-12
        assert np.isclose(abs(element.matrix[1, 0]) ** 2, math.sin(element.params['theta'] / 2) ** 2)

    def test_two_half_settings_compose_to_swap(self):
        first = make_mzi(U_A, L_A, math.pi / 2, math.pi)
        second = make_mzi(U_A, L_A, math.pi / 2, 0.0)
        swap = compose(first, second).matrix
        assert np.allclose(np.diag(swap), 0)
        assert np.allclose(np.abs(swap[[0, 1], [1, 0]]), 1)

    def test_split_out_of_range(self):
        with pytest.raises(PathIdentityError, match='Split ratio must be between 0 and 1'):
            mzi_theta_for_split(1.2)

    def test_split_not_a_number(self):
        with pytest.raises(PathIdentityError, match='not a valid number'):
            mzi_theta_for_split('half')


class TestApplyLinear:
    def test_identity(self, make_state, rail_modes):
        state = make_state(rail_modes)
        assert apply_linear(state, make_unitary(rail_modes, np.eye(4))).isclose(state)

    def test_hong_ou_mandel_dip(self):
        """One photon in each input of a balanced coupler never leaves one per output."""
        state = FockState.from_terms([FockTerm.create({U_A: 1, L_A: 1})])
        out = apply_linear(state, make_beamsplitter(U_A, L_A, 0.5))
        assert out.amplitude(((U_A, 1), (L_A, 1))) == 0
        assert np.isclose(out.amplitude(((U_A, 2),)), 0.5j)
        assert np.isclose(out.amplitude(((L_A, 2),)), 0.5j)

    def test_coupler_twice_is_squared_matrix(self, make_state, rail_modes):
        coupler = make_beamsplitter(U_A, L_A, 0.5)
        state = make_state(rail_modes)
        twice = apply_linear(apply_linear(state, coupler), coupler)
        assert twice.isclose(apply_linear(state, make_unitary((U_A, L_A), coupler.matrix @ coupler.matrix)))

    def test_untouched_modes(self):
        state = FockState.from_terms([FockTerm.create({U_B: 1}, 0.3)])
        assert apply_linear(state, make_phase(U_A, 1.0)).isclose(state)

    def test_phase(self):
        state = FockState.from_terms([FockTerm.create({U_A: 2})])
        out = apply_linear(state, make_phase(U_A, math.pi / 2))
        assert np.isclose(out.amplitude(((U_A, 2),)), -1)

    def test_norm_preserved_under_random_unitaries(self, rng, make_state, rail_modes):
        for _ in range(1000):
            k = int(rng.integers(1, 5))
            modes = [rail_modes[i] for i in rng.choice(4, size=k, replace=False)]
            element = make_unitary(modes, random_unitary(k, rng))
            state = make_state(rail_modes, terms=3, photons=int(rng.integers(1, 4)))
            assert abs(apply_linear(state, element).norm_squared() - state.norm_squared()) <= 1e-10 * max(1.0, state.norm_squared())

    def test_composition_on_shared_modes(self, rng, make_state, rail_modes):
        for _ in range(20):
            first = make_unitary(rail_modes[:3], random_unitary(3, rng))
            second = make_unitary(rail_modes[1:], random_unitary(3, rng))
            state = make_state(rail_modes, terms=3, photons=2)
            stepwise = apply_linear(apply_linear(state, first), second)
            assert stepwise.isclose(apply_linear(state, compose(first, second)), atol=1e-10)

    def test_non_unitary_rejected(self):
        with pytest.raises(NonUnitaryError):
            make_unitary((U_A, L_A), [[1, 1], [0, 1]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(PathIdentityError):
            make_unitary((U_A, L_A), np.eye(3))

    def test_random_unitary(self, rng):
        for k in (1, 2, 4):
            assert is_unitary(random_unitary(k, rng))


class TestGrating:
    def test_relabel(self):
        """Upper rail becomes H, lower rail becomes V; the amplitude is kept."""
        state = FockState.from_terms([FockTerm.create({U_A: 1, L_B: 1}, 0.25j)])
        out = apply_grating(apply_grating(state, GratingMap('a')), GratingMap('b'))
        assert out == FockState.from_labels([(['H_a', 'V_b'], 0.25j)])

    def test_single_channel(self):
        state = FockState.from_labels([(['s_d'], 1.0)])
        assert apply_grating(state, GratingMap('d')) == FockState.from_labels([(['V_d'], 1.0)])
        assert apply_grating(state, GratingMap('d', Channel.POL_H)) == FockState.from_labels([(['H_d'], 1.0)])

    def test_single_must_be_polarization(self):
        with pytest.raises(PathIdentityError):
            GratingMap('d', Channel.RAIL_UPPER)

    def test_empty_state(self):
        assert apply_grating(FockState.zero(), GratingMap('a')).is_zero()

    def test_double_relabel(self):
        state = apply_grating(FockState.from_labels([(['u_a'], 1.0)]), GratingMap('a'))
        with pytest.raises(DoubleRelabelError):
            apply_grating(state, GratingMap('a'))

    def test_invertible_and_norm_preserving(self, make_state, rail_modes):
        grating = GratingMap('a')
        for _ in range(20):
            state = make_state(rail_modes, photons=3)
            out = apply_grating(state, grating)
            assert np.isclose(out.norm_squared(), state.norm_squared())
            assert out.photon_numbers() == state.photon_numbers()
            assert invert_grating(out, grating) == state


class TestRhom:
    @pytest.mark.parametrize('delta_phi,expected', [
        (math.pi, (1.0, 0.0, 0.0)),
        (0.0, (0.0, 0.5, 0.5)),
        (math.pi / 2, (0.5, 0.25, 0.25)),
    ])
    def test_probabilities(self, delta_phi, expected):
        assert np.allclose(rhom_probabilities(delta_phi), expected, atol=1e-12)

    def test_curve(self):
        for delta_phi in np.linspace(0, 2 * math.pi, 101):
            p11, p20, p02 = rhom_probabilities(delta_phi)
            assert abs(p11 - math.sin(delta_phi / 2) ** 2) < 1e-12
            assert abs(p20 + p02 - math.cos(delta_phi / 2) ** 2) < 1e-12

    def test_probabilities_sum_to_one(self, rng):
        for delta_phi in rng.uniform(0, 2 * math.pi, 100):
            assert abs(sum(rhom_probabilities(delta_phi)) - 1) < 1e-12

    def test_output_is_normalized(self):
        assert np.isclose(rhom_source_output(1.234).norm_squared(), 1.0)
        assert np.isclose(normalize(rhom_source_output(0.5, 'b')).norm_squared(), 1.0)
