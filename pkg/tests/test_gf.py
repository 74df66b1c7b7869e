import itertools

import numpy as np
import pytest

from ncss import gf
from ncss.errors import (
    ConfigError,
    DimensionMismatchError,
    DuplicatePointError,
    SingularMatrixError,
    TooManyPointsError,
    ZeroInverseError,
    ZeroPointError,
)

import oracles


@pytest.fixture(scope="module")
def gf8():
    return gf.get_field(3)


@pytest.fixture(scope="module")
def gf8_table():
    return oracles.mul_table(0b1011, 3)


class TestScalarOps:
    def test_add_is_xor(self, gf8):
        assert gf8.add(3, 5) == 6

    def test_add_self_inverse(self, gf8):
        for x in range(8):
            assert gf8.add(x, x) == 0

    def test_add_identity_gf256(self):
        f = gf.get_field(8)
        assert f.add(0x53, 0x00) == 0x53

    def test_mul_examples(self, gf8, gf8_table):
        assert gf8_table[3][5] == 4
        assert gf8.mul(3, 5) == 4
        assert gf8_table[2][3] == 6
        assert gf8.mul(2, 3) == 6

    def test_mul_identity(self, gf8):
        for y in range(8):
            assert gf8.mul(1, y) == y

    def test_inv_example(self, gf8):
        assert oracles.inv_by_search(3, 0b1011, 3) == 6
        assert gf8.inv(3) == 6

    def test_inv_one(self, gf8):
        assert gf8.inv(1) == 1

    def test_inv_zero_raises(self, gf8):
        with pytest.raises(ZeroInverseError):
            gf8.inv(0)

    @pytest.mark.parametrize("k", [2, 3, 4, 8])
    def test_mul_matches_table_oracle_all_pairs(self, k):
        f = gf.get_field(k)
        q = 1 << k
        table = oracles.mul_table(f.poly, k)
        a = np.repeat(np.arange(q), q)
        b = np.tile(np.arange(q), q)
        got = f.mul_arr(a, b)
        want = np.array(table, dtype=np.int64).reshape(-1)
        assert np.array_equal(got, want)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_field_axioms_exhaustive(self, k):
        f = gf.get_field(k)
        q = f.q
        elems = range(q)
        for a, b, c in itertools.product(elems, repeat=3):
            assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
            assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
        for a in range(1, q):
            inverses = [b for b in range(1, q) if f.mul(a, b) == 1]
            assert inverses == [f.inv(a)]

    def test_pow_matches_repeated_mul(self, gf8):
        for x in range(8):
            for e in range(10):
                assert gf8.pow(x, e) == oracles.slow_pow(x, e, 0b1011, 3)


class TestFieldConstruction:
    def test_default_polys_are_irreducible(self):
        for k, poly in gf.DEFAULT_POLYS.items():
            assert gf.is_irreducible(poly, k)

    def test_reducible_poly_rejected(self):
        # x^4 + x^2 + 1 = (x^2 + x + 1)^2
        with pytest.raises(ConfigError):
            gf.Field(4, 0b10101)

    def test_wrong_degree_rejected(self):
        with pytest.raises(ConfigError):
            gf.Field(4, 0b1011)

    def test_k_out_of_range(self):
        with pytest.raises(ConfigError):
            gf.Field(1)
        with pytest.raises(ConfigError):
            gf.Field(17)

    def test_no_default_needs_explicit_poly(self):
        with pytest.raises(ConfigError):
            gf.Field(5)
        f = gf.Field(5, gf.find_irreducible(5))
        assert f.mul(1, 7) == 7

    def test_user_poly_accepted(self):
        # x^8 + x^6 + x^5 + x^4 + 1 is another irreducible of degree 8
        f = gf.Field(8, 0b101110001)
        assert f.mul(f.inv(0xAB), 0xAB) == 1


class TestFieldSpec:
    def test_strict_width_derived(self):
        assert gf.FieldSpec(k=3, d=2).s == 3
        assert gf.FieldSpec(k=8, d=2).s == 8
        assert gf.FieldSpec(k=8, d=4).s == 4
        assert gf.FieldSpec(k=16, d=16).s == 4

    def test_strict_width_absent(self):
        assert gf.FieldSpec(k=4, d=8).s is None  # 3 does not divide 4
        assert gf.FieldSpec(k=3, d=5).s is None  # 5 not a power of two

    def test_field_must_cover_digit_base(self):
        with pytest.raises(ConfigError):
            gf.FieldSpec(k=2, d=5)
        gf.FieldSpec(k=2, d=4)  # 2^k == d is allowed

    def test_bad_base(self):
        with pytest.raises(ConfigError):
            gf.FieldSpec(k=3, d=1)


class TestVandermonde:
    def test_example_3x3(self, gf8):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        # squares from the table oracle: 2^2 = 4, 3^2 = 5
        assert oracles.slow_pow(2, 2, 0b1011, 3) == 4
        assert oracles.slow_pow(3, 2, 0b1011, 3) == 5
        assert a.rows.tolist() == [[1, 1, 1], [1, 2, 3], [1, 4, 5]]

    def test_single_point(self, gf8):
        a = gf.build_vandermonde(gf8, (1,))
        assert a.rows.tolist() == [[1]]

    def test_duplicate_point(self, gf8):
        with pytest.raises(DuplicatePointError):
            gf.build_vandermonde(gf8, (2, 2))

    def test_zero_point(self, gf8):
        with pytest.raises(ZeroPointError):
            gf.build_vandermonde(gf8, (0, 1))

    def test_too_many_points(self, gf8):
        with pytest.raises(TooManyPointsError):
            gf.build_vandermonde(gf8, tuple(range(1, 9)))

    def test_accepts_spec(self):
        spec = gf.FieldSpec(k=3, d=2)
        a = gf.build_vandermonde(spec, (1, 2, 3))
        assert a.field.k == 3

    def test_first_row_all_ones(self):
        f = gf.get_field(8)
        a = gf.build_vandermonde(f, gf.default_points(20))
        assert np.all(a.rows[0] == 1)


class TestMatVec:
    def test_example(self, gf8, gf8_table):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        want = oracles.slow_mat_vec(a.rows.tolist(), [1, 3, 5], 0b1011, 3)
        assert want == [7, 3, 1]
        assert gf.mat_vec_mul(a, [1, 3, 5]).tolist() == [7, 3, 1]

    def test_identity_matrix(self, gf8):
        eye = np.eye(3, dtype=np.int64)
        for v in itertools.product(range(8), repeat=3):
            assert gf8.mat_vec(eye, np.array(v)).tolist() == list(v)

    def test_zero_vector(self, gf8):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        assert gf.mat_vec_mul(a, [0, 0, 0]).tolist() == [0, 0, 0]

    def test_dimension_mismatch(self, gf8):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        with pytest.raises(DimensionMismatchError):
            gf.mat_vec_mul(a, [1, 2])

    def test_batch_matches_single(self, gf8):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        rng = np.random.default_rng(7)
        vs = rng.integers(0, 8, size=(50, 3))
        batch = gf8.mat_vec_batch(a.rows, vs)
        for i in range(50):
            assert batch[i].tolist() == gf.mat_vec_mul(a, vs[i]).tolist()


class TestMatInvert:
    def test_2x2_cofactor_example(self):
        f = gf.get_field(2)
        a = gf.build_vandermonde(f, (1, 2))
        assert a.rows.tolist() == [[1, 1], [1, 2]]
        # det = 1*2 ^ 1*1 = 3, inv(3) = 2; cofactor inverse = [[3, 2], [2, 2]]
        assert oracles.inv_by_search(3, 0b111, 2) == 2
        assert a.inverse().tolist() == [[3, 2], [2, 2]]

    def test_identity(self, gf8):
        eye = np.eye(4, dtype=np.int64)
        assert gf8.mat_invert(eye).tolist() == eye.tolist()

    def test_singular_raises(self, gf8):
        with pytest.raises(SingularMatrixError):
            gf8.mat_invert(np.array([[1, 1], [1, 1]]))

    def test_product_is_identity(self):
        f = gf.get_field(8)
        a = gf.build_vandermonde(f, (5, 17, 201, 44))
        prod = f.mat_mul(a.rows, a.inverse())
        assert prod.tolist() == np.eye(4, dtype=np.int64).tolist()

    @pytest.mark.parametrize("k", [2, 3])
    def test_roundtrip_exhaustive_small_fields(self, k):
        """Decode after encode is the identity for every constructible matrix."""
        f = gf.get_field(k)
        q = f.q
        for n in range(1, 4):
            vecs = np.array(list(oracles.all_vectors(q, n)), dtype=np.int64)
            for points in itertools.permutations(range(1, q), n):
                a = gf.build_vandermonde(f, points)
                coded = f.mat_vec_batch(a.rows, vecs)
                back = f.mat_vec_batch(a.inverse(), coded)
                assert np.array_equal(back, vecs)

    @pytest.mark.parametrize("k,n", [(8, 12), (16, 9)])
    def test_roundtrip_randomized_large_fields(self, k, n):
        f = gf.get_field(k)
        rng = np.random.default_rng(k * 1000 + n)
        points = gf.default_points(n)
        a = gf.build_vandermonde(f, points)
        vecs = rng.integers(0, f.q, size=(10_000, n))
        back = f.mat_vec_batch(a.inverse(), f.mat_vec_batch(a.rows, vecs))
        assert np.array_equal(back, vecs)


class TestOpCounter:
    def test_counts_matrix_work(self, gf8):
        a = gf.build_vandermonde(gf8, (1, 2, 3))
        gf8.counter = gf.OpCounter()
        try:
            gf.mat_vec_mul(a, [1, 3, 5])
            assert gf8.counter.muls == 9
        finally:
            gf8.counter = None
