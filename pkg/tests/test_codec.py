import itertools

import pytest
from hypothesis import given, strategies as st

from vvv.codec import (
    Infeasible,
    ParamSchema,
    PhaseShares,
    check_settings,
    decode_config,
    decode_seq,
    decode_structure,
    decode_triple,
    encode_config,
    encode_seq,
    encode_triple,
    pair,
    settings_values,
    split_settings,
    unpair,
)


class TestPair:
    @pytest.mark.parametrize(
        "x, y, expected",
        [
            (0, 0, 0),
            (9, 101, 103935),
            (5, 3, 223),  # 2**5 * 7 - 1
            (1, 0, 1),
        ],
    )
    def test_known_values(self, x, y, expected):
        assert pair(x, y) == expected

    @pytest.mark.parametrize("z, expected", [(103935, (9, 101)), (0, (0, 0)), (1, (1, 0))])
    def test_unpair_known_values(self, z, expected):
        assert unpair(z) == expected

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            pair(-1, 0)
        with pytest.raises(ValueError):
            unpair(-1)

    @given(st.integers(0, 2048), st.integers(0, 2**512))
    def test_roundtrip_encode_first(self, x, y):
        assert unpair(pair(x, y)) == (x, y)

    @given(st.integers(0, 2**512))
    def test_roundtrip_decode_first(self, z):
        x, y = unpair(z)
        assert pair(x, y) == z

    def test_bijective_on_initial_segment(self):
        seen = set()
        for z in range(4096):
            xy = unpair(z)
            assert xy not in seen
            seen.add(xy)
            assert pair(*xy) == z


class TestTriple:
    @pytest.mark.parametrize("mnq, expected", [((1, 1, 1), 0), ((2, 1, 1), 1)])
    def test_known_values(self, mnq, expected):
        assert encode_triple(*mnq) == expected
        assert decode_triple(expected) == mnq

    def test_large_exponent_example(self):
        # encode_triple(10, 102, 1) nests pair(9, 101) = 103935 into the
        # exponent slot, so the value is 2**103935 - 1, not 103935.
        z = encode_triple(10, 102, 1)
        assert z == (1 << 103935) - 1
        assert decode_triple(z) == (10, 102, 1)

    def test_rejects_zero_arguments(self):
        for m, n, q in [(0, 1, 1), (1, 0, 1), (1, 1, 0)]:
            with pytest.raises(ValueError):
                encode_triple(m, n, q)

    def test_exhaustive_roundtrip_below_million(self):
        for z in range(10**6):
            assert encode_triple(*decode_triple(z)) == z

    @given(st.integers(1, 16), st.integers(1, 16), st.integers(1, 2**512))
    def test_roundtrip_large_q(self, m, n, q):
        assert decode_triple(encode_triple(m, n, q)) == (m, n, q)


class TestSeq:
    @pytest.mark.parametrize(
        "seq, expected",
        [
            ((5, 3, 2), 4639),  # 2**5 + 2**9 + 2**12 - 1
            ((0,), 0),
            ((0, 0), 2),
        ],
    )
    def test_known_values(self, seq, expected):
        assert encode_seq(seq) == expected
        assert decode_seq(expected) == seq

    def test_rejects_empty_sequence(self):
        with pytest.raises(ValueError):
            encode_seq(())

    def test_rejects_negative_elements(self):
        with pytest.raises(ValueError):
            encode_seq((1, -2))

    def test_exhaustive_short_sequences(self):
        # Every sequence of length <= 6 over elements <= 8 round-trips.
        for length in range(1, 7):
            for seq in itertools.product(range(9), repeat=length):
                assert decode_seq(encode_seq(seq)) == seq

    def test_length_equals_popcount(self):
        for t in range(2**12):
            seq = decode_seq(t)
            assert len(seq) == (t + 1).bit_count()
            assert encode_seq(seq) == t

    @given(st.lists(st.integers(0, 400), min_size=1, max_size=10))
    def test_roundtrip_random(self, seq):
        assert decode_seq(encode_seq(tuple(seq))) == tuple(seq)

    @given(st.integers(0, 2**512))
    def test_roundtrip_decode_first(self, t):
        assert encode_seq(decode_seq(t)) == t


def grid(*counts: int) -> tuple[ParamSchema, ...]:
    return tuple(
        ParamSchema(name=f"p{i}", min=0.0, step=1.0, count=c) for i, c in enumerate(counts)
    )


class TestConfigCodec:
    def test_all_zero_indices_is_code_zero(self):
        assert encode_config((0, 0, 0), PhaseShares(1, 1, 1)) == 0
        assert decode_config(0, PhaseShares(1, 1, 1), grid(4, 4, 4)) == (0, 0, 0)

    def test_composition_matches_primitive_oracles(self):
        # Phase codes come from encode_seq, nested through pair with the
        # later phases in the linear slots.
        shares = PhaseShares(2, 1, 1)
        settings = (5, 3, 2, 0)
        expected = pair(encode_seq((5, 3)), pair(encode_seq((2,)), encode_seq((0,))))
        assert encode_config(settings, shares) == expected
        assert decode_config(expected, shares, grid(8, 8, 8, 8)) == settings

    def test_zero_share_phase_contributes_zero(self):
        shares = PhaseShares(0, 1, 1)
        settings = (2, 1)
        code = encode_config(settings, shares)
        assert code == pair(0, pair(encode_seq((2,)), encode_seq((1,))))
        assert decode_config(code, shares, grid(4, 4)) == settings

    def test_zero_share_slot_must_be_zero(self):
        code = pair(1, pair(0, 0))
        result = decode_config(code, PhaseShares(0, 1, 1), grid(4, 4))
        assert isinstance(result, Infeasible)
        assert "zero-share" in result.reason

    def test_wrong_arity_is_infeasible(self):
        # A veni slot holding a 3-sequence under a declared share of 2.
        code = pair(encode_seq((1, 1, 1)), pair(encode_seq((0,)), encode_seq((0,))))
        result = decode_config(code, PhaseShares(2, 1, 1), grid(4, 4, 4, 4))
        assert isinstance(result, Infeasible)
        assert "arity 3" in result.reason

    def test_out_of_grid_index_is_infeasible(self):
        shares = PhaseShares(1, 1, 1)
        code = encode_config((3, 0, 0), shares)
        result = decode_config(code, shares, grid(2, 2, 2))
        assert isinstance(result, Infeasible)
        assert "outside grid" in result.reason

    def test_structural_decode_ignores_grids(self):
        shares = PhaseShares(1, 1, 1)
        code = encode_config((9, 0, 0), shares)
        assert decode_structure(code, shares) == (9, 0, 0)

    @pytest.mark.parametrize(
        "shares",
        [
            PhaseShares(1, 1, 1),
            PhaseShares(2, 1, 1),
            PhaseShares(1, 2, 1),
            PhaseShares(1, 1, 2),
            PhaseShares(0, 2, 2),
            PhaseShares(2, 2, 0),
            PhaseShares(4, 0, 0),
            PhaseShares(0, 0, 3),
        ],
    )
    def test_exhaustive_roundtrip_small_grids(self, shares):
        schemas = grid(*([3] * shares.total))
        codes = set()
        for settings in itertools.product(range(3), repeat=shares.total):
            code = encode_config(settings, shares)
            assert code not in codes
            codes.add(code)
            assert decode_config(code, shares, schemas) == settings

    def test_decode_total_on_window(self):
        shares = PhaseShares(1, 1, 1)
        schemas = grid(4, 4, 4)
        feasible = 0
        for code in range(10_000):
            result = decode_config(code, shares, schemas)
            if isinstance(result, Infeasible):
                assert result.reason
            else:
                assert encode_config(result, shares) == code
                feasible += 1
        assert feasible > 0

    def test_schema_share_mismatch_is_an_error(self):
        with pytest.raises(ValueError):
            decode_config(0, PhaseShares(1, 1, 1), grid(4, 4))


class TestSettingsHelpers:
    def test_split_by_shares(self):
        assert split_settings((5, 3, 2, 0), PhaseShares(2, 1, 1)) == ((5, 3), (2,), (0,))
        assert split_settings((1, 2), PhaseShares(0, 1, 1)) == ((), (1,), (2,))

    def test_split_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            split_settings((1, 2), PhaseShares(1, 1, 1))

    def test_values_follow_grid(self):
        schemas = (
            ParamSchema("sigma", min=0.5, step=0.5, count=8),
            ParamSchema("t", min=0.0, step=16.0, count=16),
        )
        assert settings_values((0, 15), schemas) == (0.5, 240.0)
        assert settings_values((3, 0), schemas) == (2.0, 0.0)

    def test_check_settings_reports_all_problems(self):
        schemas = grid(2, 2)
        assert check_settings((0, 1), schemas) == []
        problems = check_settings((2, 5), schemas)
        assert len(problems) == 2

    def test_schema_validation(self):
        with pytest.raises(ValueError):
            ParamSchema("bad", min=0.0, step=0.0, count=4)
        with pytest.raises(ValueError):
            ParamSchema("bad", min=0.0, step=1.0, count=0)
        with pytest.raises(ValueError):
            PhaseShares(-1, 1, 1)
